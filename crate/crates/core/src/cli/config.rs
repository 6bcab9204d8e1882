//! Flag/config-file resolution. A flag wins over the `[command]` section of
//! the TOML file, which wins over its top level. Every resolved value is
//! recorded for the run manifest.

use std::cell::RefCell;
use std::path::Path;

use serde_json::{Map, Value};

use crate::data_io::json_real;
use crate::error::{Error, Result};

pub struct Resolver {
    root: toml::Table,
    section: Option<toml::Table>,
    resolved: RefCell<Map<String, Value>>,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidConfig(format!("--{}: {msg}", key.replace('_', "-")))
}

impl Resolver {
    pub fn load(path: Option<&Path>, command: &str) -> Result<Self> {
        let root: toml::Table = match path {
            None => toml::Table::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidConfig(format!("cannot read config {}: {e}", p.display()))
                })?;
                text.parse()
                    .map_err(|e| Error::InvalidConfig(format!("config {}: {e}", p.display())))?
            }
        };
        let section = match root.get(command) {
            Some(toml::Value::Table(t)) => Some(t.clone()),
            Some(_) => {
                return Err(Error::InvalidConfig(format!(
                    "config key '{command}' must be a table"
                )))
            }
            None => None,
        };
        Ok(Self {
            root,
            section,
            resolved: RefCell::new(Map::new()),
        })
    }

    fn lookup(&self, key: &str) -> Option<&toml::Value> {
        self.section
            .as_ref()
            .and_then(|s| s.get(key))
            .or_else(|| self.root.get(key))
    }

    fn record(&self, key: &str, value: Value) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn f64(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.lookup(key) {
                None => None,
                Some(toml::Value::Float(f)) => Some(*f),
                Some(toml::Value::Integer(i)) => Some(*i as f64),
                Some(other) => return Err(invalid(key, format!("expected a number, got {other}"))),
            },
        };
        if let Some(x) = v {
            if !x.is_finite() {
                return Err(invalid(key, format!("must be finite, got {x}")));
            }
            self.record(key, json_real(x));
        }
        Ok(v)
    }

    pub fn u64(&self, key: &str, flag: Option<u64>) -> Result<Option<u64>> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.lookup(key) {
                None => None,
                Some(toml::Value::Integer(i)) if *i >= 0 => Some(*i as u64),
                Some(other) => {
                    return Err(invalid(
                        key,
                        format!("expected a nonnegative integer, got {other}"),
                    ))
                }
            },
        };
        if let Some(x) = v {
            self.record(key, Value::from(x));
        }
        Ok(v)
    }

    pub fn string(&self, key: &str, flag: Option<String>) -> Result<Option<String>> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.lookup(key) {
                None => None,
                Some(toml::Value::String(s)) => Some(s.clone()),
                Some(other) => return Err(invalid(key, format!("expected a string, got {other}"))),
            },
        };
        if let Some(s) = &v {
            self.record(key, Value::String(s.clone()));
        }
        Ok(v)
    }

    /// Boolean switch: a set flag forces `true`, otherwise the config decides.
    pub fn switch(&self, key: &str, flag: bool, default: bool) -> Result<bool> {
        let v = if flag {
            true
        } else {
            match self.lookup(key) {
                None => default,
                Some(toml::Value::Boolean(b)) => *b,
                Some(other) => {
                    return Err(invalid(key, format!("expected true/false, got {other}")))
                }
            }
        };
        self.record(key, Value::Bool(v));
        Ok(v)
    }

    /// Comma-separated positive integers, or a TOML integer array.
    pub fn u32_list(&self, key: &str, flag: Option<String>, default: &str) -> Result<Vec<u32>> {
        let parse_item = |s: &str| -> Result<u32> {
            let n: u32 = s
                .trim()
                .parse()
                .map_err(|_| invalid(key, format!("'{}' is not a positive integer", s.trim())))?;
            if n == 0 {
                return Err(invalid(key, "values must be at least 1"));
            }
            Ok(n)
        };
        let list: Vec<u32> = match flag {
            Some(s) => split_list(&s)
                .into_iter()
                .map(parse_item)
                .collect::<Result<_>>()?,
            None => match self.lookup(key) {
                None => split_list(default)
                    .into_iter()
                    .map(parse_item)
                    .collect::<Result<_>>()?,
                Some(toml::Value::String(s)) => split_list(s)
                    .into_iter()
                    .map(parse_item)
                    .collect::<Result<_>>()?,
                Some(toml::Value::Array(items)) => items
                    .iter()
                    .map(|it| match it {
                        toml::Value::Integer(i) if *i >= 1 && *i <= i64::from(u32::MAX) => {
                            Ok(*i as u32)
                        }
                        other => Err(invalid(key, format!("'{other}' is not a positive integer"))),
                    })
                    .collect::<Result<_>>()?,
                Some(other) => return Err(invalid(key, format!("expected a list, got {other}"))),
            },
        };
        if list.is_empty() {
            return Err(invalid(key, "list must not be empty"));
        }
        self.record(key, Value::from(list.clone()));
        Ok(list)
    }

    /// Like [`Self::f64`], recording `default` when nothing was given.
    pub fn f64_or(&self, key: &str, flag: Option<f64>, default: f64) -> Result<f64> {
        let v = self.f64(key, flag)?.unwrap_or(default);
        self.record(key, json_real(v));
        Ok(v)
    }

    pub fn u64_or(&self, key: &str, flag: Option<u64>, default: u64) -> Result<u64> {
        let v = self.u64(key, flag)?.unwrap_or(default);
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn string_or(&self, key: &str, flag: Option<String>, default: &str) -> Result<String> {
        let v = self
            .string(key, flag)?
            .unwrap_or_else(|| default.to_string());
        self.record(key, Value::String(v.clone()));
        Ok(v)
    }

    pub fn into_resolved(self) -> Map<String, Value> {
        self.resolved.into_inner()
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').filter(|p| !p.trim().is_empty()).collect()
}

pub fn require<T>(key: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| invalid(key, "is required"))
}

pub fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be > 0, got {v}")))
    }
}

pub fn check(key: &str, ok: bool, msg: impl std::fmt::Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(key, msg))
    }
}
