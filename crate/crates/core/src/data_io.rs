//! Price ingestion, detrended return construction and result serialization.
//!
//! Input: a comma-separated UTF-8 file with (case-insensitive) `date` and
//! `close` columns, dates in ISO-8601 (`YYYY-MM-DD`), strictly increasing.
//! Output reals are written with 17 significant digits so every value
//! round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub dates: Vec<NaiveDate>,
    pub close: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<NaiveDate>, close: Vec<f64>) -> Result<Self> {
        if dates.len() != close.len() {
            return Err(Error::InvalidConfig(format!(
                "dates ({}) and closes ({}) differ in length",
                dates.len(),
                close.len()
            )));
        }
        if let Some(i) = close.iter().position(|c| !(*c > 0.0) || !c.is_finite()) {
            return Err(Error::domain(format!(
                "close at index {i} must be positive, got {}",
                close[i]
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::domain(format!(
                "dates must be strictly increasing (index {})",
                i + 1
            )));
        }
        Ok(Self { dates, close })
    }

    pub fn len(&self) -> usize {
        self.close.len()
    }

    pub fn is_empty(&self) -> bool {
        self.close.is_empty()
    }
}

/// Returns z over `tau` base steps of `dt` days each.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub z: Vec<f64>,
    /// Return horizon in base steps (days for market data).
    pub tau: u32,
    /// Duration of one base step in days; 1 for daily closes.
    pub dt: f64,
    /// Drift removed per day.
    pub mu_hat: f64,
    pub overlapping: bool,
}

impl ReturnSeries {
    pub fn new(z: Vec<f64>, tau: u32, dt: f64, mu_hat: f64, overlapping: bool) -> Self {
        Self {
            z,
            tau,
            dt,
            mu_hat,
            overlapping,
        }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Horizon of each return in days.
    pub fn horizon(&self) -> f64 {
        f64::from(self.tau) * self.dt
    }
}

/// Supported input formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
}

/// Output encodings for [`write_results`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown format '{other}' (expected json or csv)"
            ))),
        }
    }
}

/// Read a price file. Rows are numbered as file lines (header = line 1).
pub fn load_prices(path: impl AsRef<Path>, format: InputFormat) -> Result<PriceSeries> {
    let path = path.as_ref();
    match format {
        InputFormat::Csv => load_csv(path),
    }
}

fn load_csv(path: &Path) -> Result<PriceSeries> {
    let parse_err = |row: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_err(1, format!("{other:?}")),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(1, format!("missing '{name}' column")))
    };
    let date_col = column("date")?;
    let close_col = column("close")?;

    let mut dates = Vec::new();
    let mut close = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        let date_raw = record
            .get(date_col)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| parse_err(line, "missing date".into()))?;
        let date = NaiveDate::parse_from_str(date_raw, "%Y-%m-%d")
            .map_err(|e| parse_err(line, format!("date '{date_raw}': {e}")))?;
        let close_raw = record
            .get(close_col)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| parse_err(line, "missing close".into()))?;
        let value: f64 = close_raw
            .parse()
            .map_err(|_| parse_err(line, format!("close '{close_raw}' is not a number")))?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(parse_err(
                line,
                format!("close must be positive, got {close_raw}"),
            ));
        }
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(parse_err(
                    line,
                    format!("date {date} does not follow {prev} (dates must strictly increase)"),
                ));
            }
        }
        dates.push(date);
        close.push(value);
    }
    Ok(PriceSeries { dates, close })
}

/// Detrended τ-day log returns. Trading days are indexed consecutively.
///
/// r_t = ln(S_t/S_0), μ̂ = r_N/N when `detrend`, x_t = r_t − μ̂t and
/// z_i = x_{t+τ} − x_t with stride 1 (overlapping) or τ.
pub fn make_returns(
    prices: &PriceSeries,
    tau: u32,
    overlapping: bool,
    detrend: bool,
) -> Result<ReturnSeries> {
    if tau == 0 {
        return Err(Error::InvalidConfig("tau must be at least 1".into()));
    }
    let tau_n = tau as usize;
    if prices.len() <= tau_n {
        return Err(Error::InsufficientData {
            needed: tau_n + 1,
            got: prices.len(),
        });
    }
    let s0 = prices.close[0];
    let r: Vec<f64> = prices.close.iter().map(|s| (s / s0).ln()).collect();
    let days = (r.len() - 1) as f64;
    let mu_hat = if detrend { r[r.len() - 1] / days } else { 0.0 };
    let x: Vec<f64> = r
        .iter()
        .enumerate()
        .map(|(t, rt)| rt - mu_hat * t as f64)
        .collect();
    let stride = if overlapping { 1 } else { tau_n };
    let z = (0..x.len() - tau_n)
        .step_by(stride)
        .map(|t| x[t + tau_n] - x[t])
        .collect();
    Ok(ReturnSeries::new(z, tau, 1.0, mu_hat, overlapping))
}

/// Render a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// JSON value for a real: a 17-digit number, or null when not finite.
pub fn json_real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    fmt_real(x)
        .parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn json_opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, json_real)
}

/// Anything `write_results` can serialize.
pub trait Artifact {
    fn to_json(&self) -> Value;
    fn csv_header(&self) -> Vec<String>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

impl<T: Artifact> Artifact for [T] {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(Artifact::to_json).collect())
    }

    fn csv_header(&self) -> Vec<String> {
        self.first().map(Artifact::csv_header).unwrap_or_default()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.iter().flat_map(Artifact::csv_rows).collect()
    }
}

impl<T: Artifact> Artifact for Vec<T> {
    fn to_json(&self) -> Value {
        self.as_slice().to_json()
    }

    fn csv_header(&self) -> Vec<String> {
        self.as_slice().csv_header()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.as_slice().csv_rows()
    }
}

impl Artifact for crate::sde::SimPath {
    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("dt".into(), json_real(self.dt));
        m.insert("v".into(), self.v.iter().map(|&x| json_real(x)).collect());
        m.insert("x".into(), self.x.iter().map(|&x| json_real(x)).collect());
        Value::Object(m)
    }

    fn csv_header(&self) -> Vec<String> {
        vec!["step".into(), "v".into(), "x".into()]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.v
            .iter()
            .zip(&self.x)
            .enumerate()
            .map(|(i, (v, x))| vec![i.to_string(), fmt_real(*v), fmt_real(*x)])
            .collect()
    }
}

impl Artifact for PriceSeries {
    fn to_json(&self) -> Value {
        Value::Array(
            self.dates
                .iter()
                .zip(&self.close)
                .map(|(d, c)| {
                    let mut m = Map::new();
                    m.insert("date".into(), Value::String(d.to_string()));
                    m.insert("close".into(), json_real(*c));
                    Value::Object(m)
                })
                .collect(),
        )
    }

    fn csv_header(&self) -> Vec<String> {
        vec!["date".into(), "close".into()]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.dates
            .iter()
            .zip(&self.close)
            .map(|(d, c)| vec![d.to_string(), fmt_real(*c)])
            .collect()
    }
}

fn record(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Artifact for crate::calibration::FitResult {
    fn to_json(&self) -> Value {
        let bp = self.beta_prime();
        let kappas = self.kappa_sq();
        record(vec![
            ("model", Value::String(self.model.to_string())),
            ("p", json_opt_real(bp.map(|b| b.p))),
            ("q", json_opt_real(bp.map(|b| b.q))),
            ("beta", json_opt_real(bp.map(|b| b.beta))),
            ("alpha", json_opt_real(self.alpha())),
            ("theta", json_real(self.theta())),
            ("gamma", json_opt_real(self.gamma)),
            ("kappa_M_sq", json_opt_real(kappas.map(|k| k.0))),
            ("kappa_H_sq", json_opt_real(kappas.map(|k| k.1))),
            ("ks", json_real(self.ks)),
            ("n", Value::from(self.n)),
            ("tau", json_real(self.tau)),
            ("converged", Value::Bool(self.converged)),
        ])
    }

    fn csv_header(&self) -> Vec<String> {
        self.to_json().csv_header()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.to_json().csv_rows()
    }
}

impl Artifact for crate::returns_density::DensityTable {
    fn to_json(&self) -> Value {
        Value::Array(
            (0..self.z.len())
                .map(|i| {
                    record(vec![
                        ("z", json_real(self.z[i])),
                        ("pdf", json_real(self.pdf[i])),
                        ("cdf", json_real(self.cdf[i])),
                    ])
                })
                .collect(),
        )
    }

    fn csv_header(&self) -> Vec<String> {
        vec!["z".into(), "pdf".into(), "cdf".into()]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        (0..self.z.len())
            .map(|i| {
                vec![
                    fmt_real(self.z[i]),
                    fmt_real(self.pdf[i]),
                    fmt_real(self.cdf[i]),
                ]
            })
            .collect()
    }
}

impl Artifact for crate::realized::RatioCurve {
    fn to_json(&self) -> Value {
        let reference = self.reference();
        Value::Array(
            (0..self.len())
                .map(|i| {
                    record(vec![
                        ("T", json_real(self.t[i])),
                        ("ratio", json_real(self.ratio[i])),
                        ("f_gamma_T", json_opt_real(reference.as_ref().map(|f| f[i]))),
                    ])
                })
                .collect(),
        )
    }

    fn csv_header(&self) -> Vec<String> {
        vec!["T".into(), "ratio".into(), "f_gamma_T".into()]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let reference = self.reference();
        (0..self.len())
            .map(|i| {
                vec![
                    fmt_real(self.t[i]),
                    fmt_real(self.ratio[i]),
                    reference.as_ref().map_or(String::new(), |f| fmt_real(f[i])),
                ]
            })
            .collect()
    }
}

impl Artifact for Value {
    fn to_json(&self) -> Value {
        self.clone()
    }

    fn csv_header(&self) -> Vec<String> {
        match self {
            Value::Object(m) => m.keys().cloned().collect(),
            _ => vec!["value".into()],
        }
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        match self {
            Value::Object(m) => vec![m.values().map(csv_cell).collect()],
            other => vec![vec![csv_cell(other)]],
        }
    }
}

/// Serialize an artifact to `path`, replacing any existing file atomically.
pub fn write_results<A: Artifact + ?Sized>(
    artifact: &A,
    path: impl AsRef<Path>,
    format: OutputFormat,
) -> Result<()> {
    let bytes = render(artifact, format)?;
    write_atomic(path.as_ref(), &bytes)
}

/// The bytes `write_results` would write.
pub fn render<A: Artifact + ?Sized>(artifact: &A, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&artifact.to_json())
                .map_err(|e| Error::InvalidConfig(format!("json encoding: {e}")))?;
            out.push(b'\n');
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::InvalidConfig(format!("csv encoding: {e}"));
            w.write_record(artifact.csv_header()).map_err(csv_err)?;
            for row in artifact.csv_rows() {
                w.write_record(row).map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| Error::InvalidConfig(format!("csv encoding: {e}")))
        }
    }
}

/// Write through a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Create `dir` (and parents) if missing.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(close: &[f64]) -> PriceSeries {
        let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let dates = (0..close.len())
            .map(|i| start + chrono::Days::new(i as u64))
            .collect();
        PriceSeries::new(dates, close.to_vec()).unwrap()
    }

    #[test]
    fn single_return() {
        let s = series(&[100.0, 100.0 * 0.01f64.exp()]);
        let r = make_returns(&s, 1, true, false).unwrap();
        assert_eq!(r.n(), 1);
        assert!((r.z[0] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn detrending_removes_exponential_growth() {
        let close: Vec<f64> = (0..50).map(|t| 100.0 * (0.003 * t as f64).exp()).collect();
        let r = make_returns(&series(&close), 1, true, true).unwrap();
        assert!(r.z.iter().all(|z| z.abs() < 1e-15));
        assert!((r.mu_hat - 0.003).abs() < 1e-15);
    }

    #[test]
    fn overlapping_count() {
        let close: Vec<f64> = (0..10).map(|t| 100.0 + t as f64).collect();
        assert_eq!(
            make_returns(&series(&close), 5, true, false).unwrap().n(),
            5
        );
        assert_eq!(
            make_returns(&series(&close), 5, false, false).unwrap().n(),
            1
        );
        assert!(make_returns(&series(&close), 10, true, false).is_err());
    }

    #[test]
    fn real_formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5e-7] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(json_real(f64::NAN), Value::Null);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        let d = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        assert!(PriceSeries::new(vec![d, d], vec![1.0, 2.0]).is_err());
        assert!(PriceSeries::new(vec![d], vec![0.0]).is_err());
    }
}
