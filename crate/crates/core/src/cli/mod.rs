//! Command-line front end. Exit codes: 0 success, 1 runtime failure,
//! 2 invalid input.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::data_io::{ensure_dir, render, write_atomic, Artifact, OutputFormat};
use crate::error::{Error, Result};

pub use config::Resolver;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mhmvol",
    version,
    about = "Stochastic volatility toolkit: simulate, fit, density, moments, rv"
)]
pub struct Cli {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SharedArgs {
    /// Price CSV with date and close columns.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Directory for artifacts and the run manifest (default: current directory).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file; keys mirror the long flag names with '_' for '-'.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// json or csv.
    #[arg(long, global = true)]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a variance path and its log returns.
    Simulate(SimulateArgs),
    /// Fit variance laws to the returns of a price series.
    Fit(FitArgs),
    /// Tabulate the return density and CDF on a z-grid.
    Density(DensityArgs),
    /// Theoretical and empirical even moments of returns.
    Moments(MomentsArgs),
    /// Variance of realized variance against window length.
    Rv(RvArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Fit(_) => "fit",
            Command::Density(_) => "density",
            Command::Moments(_) => "moments",
            Command::Rv(_) => "rv",
        }
    }
}

/// Model selection plus any of the equivalent parameterizations.
#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// mm, hm or mhm.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Shape α of the Ga/IGa laws.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Relaxation rate γ (1/day).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub kappa_m_sq: Option<f64>,
    #[arg(long)]
    pub kappa_h_sq: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Step in days (default 1).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Total steps including burn-in.
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub record_every: Option<u64>,
    /// full-truncation or reflection.
    #[arg(long)]
    pub scheme: Option<String>,
    /// ito or stratonovich.
    #[arg(long)]
    pub return_drift: Option<String>,
    /// Initial variance (default θ).
    #[arg(long)]
    pub v0: Option<f64>,
    /// Also write prices.csv (needs one record per day).
    #[arg(long)]
    pub prices: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Comma-separated models (default mhm).
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated horizons in days (default 1).
    #[arg(long)]
    pub taus: Option<String>,
    /// ks or mle.
    #[arg(long)]
    pub objective: Option<String>,
    #[arg(long)]
    pub non_overlapping: bool,
    #[arg(long)]
    pub no_detrend: bool,
    /// Known γ; enables the κ² columns.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Estimate γ from the squared-return autocovariance.
    #[arg(long)]
    pub fit_gamma: bool,
    #[arg(long)]
    pub max_lag: Option<u64>,
    #[arg(long)]
    pub restarts: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Horizon in days (default 1).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Half-width of the grid (default 10·√(θτ)).
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long)]
    pub points: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub taus: Option<String>,
    #[arg(long)]
    pub non_overlapping: bool,
    #[arg(long)]
    pub no_detrend: bool,
}

#[derive(Debug, Args)]
pub struct RvArgs {
    /// Comma-separated window lengths in days.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// γ override; otherwise fitted from the autocovariance.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Boundary between the slope fits (default 1/γ).
    #[arg(long)]
    pub split_t: Option<f64>,
    #[arg(long)]
    pub max_lag: Option<u64>,
    #[arg(long)]
    pub no_detrend: bool,
}

/// Shared context for one command run.
pub struct Run {
    pub command: &'static str,
    pub res: Resolver,
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub format: OutputFormat,
    artifacts: Vec<(String, String)>,
}

impl Run {
    fn new(shared: SharedArgs, command: &'static str) -> Result<Self> {
        let res = Resolver::load(shared.config.as_deref(), command)?;
        let input = res
            .string(
                "input",
                shared.input.map(|p| p.to_string_lossy().into_owned()),
            )?
            .map(PathBuf::from);
        let output_dir = PathBuf::from(
            res.string(
                "output_dir",
                shared.output_dir.map(|p| p.to_string_lossy().into_owned()),
            )?
            .unwrap_or_else(|| ".".into()),
        );
        let seed = res.u64("seed", shared.seed)?.unwrap_or(0);
        let format = res
            .string("format", shared.format)?
            .map(|f| f.parse())
            .transpose()
            .map_err(|e: Error| Error::InvalidConfig(format!("--format: {e}")))?
            .unwrap_or(OutputFormat::Json);
        Ok(Self {
            command,
            res,
            input,
            output_dir,
            seed,
            format,
            artifacts: Vec::new(),
        })
    }

    pub fn extension(&self) -> &'static str {
        match self.format {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }

    /// Write an artifact into the output directory and remember its hash.
    pub fn emit<A: Artifact + ?Sized>(
        &mut self,
        name: &str,
        artifact: &A,
        format: OutputFormat,
    ) -> Result<PathBuf> {
        let bytes = render(artifact, format)?;
        self.emit_bytes(name, &bytes)
    }

    fn emit_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        ensure_dir(&self.output_dir)?;
        let path = self.output_dir.join(name);
        write_atomic(&path, bytes)?;
        self.artifacts.push((name.to_string(), sha256_hex(bytes)));
        Ok(path)
    }

    fn finish(self) -> Result<PathBuf> {
        let Run {
            command,
            res,
            output_dir,
            seed,
            artifacts,
            ..
        } = self;
        let artifacts: Vec<Value> = artifacts
            .into_iter()
            .map(|(file, hash)| {
                let mut m = Map::new();
                m.insert("file".into(), Value::String(file));
                m.insert("sha256".into(), Value::String(hash));
                Value::Object(m)
            })
            .collect();
        let mut manifest = Map::new();
        manifest.insert("command".into(), Value::String(command.into()));
        manifest.insert(
            "version".into(),
            Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        manifest.insert("seed".into(), Value::from(seed));
        manifest.insert("config".into(), Value::Object(res.into_resolved()));
        manifest.insert("artifacts".into(), Value::Array(artifacts));
        let bytes = render(&Value::Object(manifest), OutputFormat::Json)?;
        ensure_dir(&output_dir)?;
        let path = output_dir.join(format!("{command}.manifest.json"));
        write_atomic(&path, &bytes)?;
        Ok(path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Parse `args` (including the program name) and execute. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_VALIDATION,
            };
        }
    };
    match execute(cli) {
        Ok(manifest) => {
            eprintln!("wrote {}", manifest.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

/// Run a parsed command; returns the manifest path.
pub fn execute(cli: Cli) -> Result<PathBuf> {
    let mut run = Run::new(cli.shared, cli.command.name())?;
    match cli.command {
        Command::Simulate(a) => commands::simulate(&mut run, a)?,
        Command::Fit(a) => commands::fit(&mut run, a)?,
        Command::Density(a) => commands::density(&mut run, a)?,
        Command::Moments(a) => commands::moments(&mut run, a)?,
        Command::Rv(a) => commands::rv(&mut run, a)?,
    }
    run.finish()
}

pub(crate) fn input_path(run: &Run) -> Result<&Path> {
    run.input
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("--input: a price CSV is required".into()))
}
