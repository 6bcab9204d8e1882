//! Euler–Maruyama simulation of the variance SDE
//!
//! ```text
//! dv = −γ(v − θ) dt + √(κ_M² v² + κ_H² v) dW⁽²⁾
//! dx = σ dW⁽¹⁾                      (Ito returns)
//! dx = −σ²/2 dt + σ dW⁽¹⁾            (Stratonovich price equation reduced to Ito)
//! dW⁽²⁾ = ρ dW⁽¹⁾ + √(1−ρ²) dZ
//! ```
//!
//! MM and HM are the same integrator with κ_H = 0 or κ_M = 0.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data_io::ReturnSeries;
use crate::distributions::{ModelKind, ModelParams};
use crate::error::{Error, Result};

/// How negative excursions of the discretized variance are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Drift and diffusion evaluated at max(v, 0); the raw state may go negative.
    #[default]
    FullTruncation,
    /// The state is replaced by |v| after every step.
    Reflection,
}

/// Which log-return equation drives x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnDrift {
    /// dx = σ dW.
    #[default]
    Ito,
    /// dx = −σ²/2 dt + σ dW.
    StratonovichCorrected,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "full-truncation" => Ok(Scheme::FullTruncation),
            "reflection" => Ok(Scheme::Reflection),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}' (expected full-truncation or reflection)"
            ))),
        }
    }
}

impl std::str::FromStr for ReturnDrift {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ito" => Ok(ReturnDrift::Ito),
            "stratonovich" | "stratonovich-corrected" => Ok(ReturnDrift::StratonovichCorrected),
            other => Err(Error::InvalidConfig(format!(
                "unknown return drift '{other}' (expected ito or stratonovich)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Integration step in days.
    pub dt: f64,
    /// Total number of steps, burn-in included.
    pub n_steps: usize,
    /// Leading steps that are simulated but not recorded.
    pub burn_in: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub return_drift: ReturnDrift,
    /// Keep every k-th state; `iv` then holds the variance integrated over each stride.
    pub record_every: usize,
    /// Initial variance; θ when `None`.
    pub v0: Option<f64>,
    /// The run fails once v exceeds `overflow_cap · θ`.
    pub overflow_cap: f64,
}

impl SimConfig {
    pub fn new(dt: f64, n_steps: usize, seed: u64) -> Self {
        Self {
            dt,
            n_steps,
            burn_in: 0,
            seed,
            scheme: Scheme::default(),
            return_drift: ReturnDrift::default(),
            record_every: 1,
            v0: None,
            overflow_cap: 1e12,
        }
    }

    pub fn burn_in(mut self, steps: usize) -> Self {
        self.burn_in = steps;
        self
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn return_drift(mut self, drift: ReturnDrift) -> Self {
        self.return_drift = drift;
        self
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn v0(mut self, v0: f64) -> Self {
        self.v0 = Some(v0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be positive".into()));
        }
        if self.burn_in >= self.n_steps {
            return Err(Error::InvalidConfig(format!(
                "burn_in ({}) must be smaller than n_steps ({})",
                self.burn_in, self.n_steps
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be positive".into()));
        }
        if let Some(v0) = self.v0 {
            if !(v0 >= 0.0) || !v0.is_finite() {
                return Err(Error::InvalidConfig(format!("v0 must be >= 0, got {v0}")));
            }
        }
        if !(self.overflow_cap > 0.0) {
            return Err(Error::InvalidConfig("overflow_cap must be positive".into()));
        }
        Ok(())
    }
}

/// A recorded trajectory. Entry 0 is the state right after burn-in, with x = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPath {
    /// Variance at each recorded time (nonnegative).
    pub v: Vec<f64>,
    /// Detrended log return x_t = ln(S_t/S_0) − μt.
    pub x: Vec<f64>,
    /// ∫ v dt over the stride ending at each record; `iv[0] = 0`.
    pub iv: Vec<f64>,
    /// Spacing between records in days.
    pub dt: f64,
    /// Price drift, kept for reconstructing S.
    pub mu: f64,
}

impl SimPath {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Records per day, when the record spacing divides one day.
    pub fn records_per_day(&self) -> Result<usize> {
        let k = (1.0 / self.dt).round();
        if k < 1.0 || ((1.0 / self.dt) - k).abs() > 1e-9 * k {
            return Err(Error::InvalidConfig(format!(
                "record spacing {} day does not divide one day",
                self.dt
            )));
        }
        Ok(k as usize)
    }

    /// Consecutive record-to-record increments of x, sampled every `dt` days.
    pub fn increments(&self) -> ReturnSeries {
        let z = self.x.windows(2).map(|w| w[1] - w[0]).collect();
        ReturnSeries::new(z, 1, self.dt, 0.0, false)
    }

    /// Log prices ln S_t relative to S_0.
    pub fn log_prices(&self) -> Vec<f64> {
        self.x
            .iter()
            .enumerate()
            .map(|(i, x)| x + self.mu * self.dt * i as f64)
            .collect()
    }
}

/// Simulate `model` with the given coefficients. For MM the Heston amplitude is
/// ignored and for HM the multiplicative one.
pub fn simulate(model: ModelKind, params: &ModelParams, cfg: &SimConfig) -> Result<SimPath> {
    params.validate()?;
    cfg.validate()?;
    let (km2, kh2) = match model {
        ModelKind::Mm => (params.kappa_m_sq(), 0.0),
        ModelKind::Hm => (0.0, params.kappa_h_sq()),
        ModelKind::Mhm => (params.kappa_m_sq(), params.kappa_h_sq()),
    };
    if km2 == 0.0 && kh2 == 0.0 {
        return Err(Error::DegenerateModel(format!(
            "{model} needs a nonzero noise amplitude"
        )));
    }

    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let (gamma, theta, rho) = (params.gamma, params.theta, params.rho);
    let rho_perp = (1.0 - rho * rho).max(0.0).sqrt();
    let cap = cfg.overflow_cap * theta;
    let strat = cfg.return_drift == ReturnDrift::StratonovichCorrected;
    let reflect = cfg.scheme == Scheme::Reflection;

    let recorded = (cfg.n_steps - cfg.burn_in) / cfg.record_every;
    let mut v_out = Vec::with_capacity(recorded + 1);
    let mut x_out = Vec::with_capacity(recorded + 1);
    let mut iv_out = Vec::with_capacity(recorded + 1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v = cfg.v0.unwrap_or(theta);
    let mut x = 0.0;
    let mut iv = 0.0;
    let mut since_record = 0usize;

    for step in 0..cfg.n_steps {
        if step == cfg.burn_in {
            x = 0.0;
            iv = 0.0;
            since_record = 0;
            v_out.push(v.max(0.0));
            x_out.push(0.0);
            iv_out.push(0.0);
        }
        let e1: f64 = StandardNormal.sample(&mut rng);
        let e2: f64 = StandardNormal.sample(&mut rng);
        let vp = v.max(0.0);
        let sigma = vp.sqrt();
        let dw1 = sqrt_dt * e1;
        let dw2 = rho * dw1 + rho_perp * sqrt_dt * e2;

        x += sigma * dw1;
        if strat {
            x -= 0.5 * vp * dt;
        }
        iv += vp * dt;

        let diffusion = (km2 * vp * vp + kh2 * vp).sqrt();
        v += -gamma * (vp - theta) * dt + diffusion * dw2;
        if reflect {
            v = v.abs();
        }
        if !(v <= cap) {
            return Err(Error::Overflow {
                step,
                value: v,
                cap,
            });
        }

        if step >= cfg.burn_in {
            since_record += 1;
            if since_record == cfg.record_every {
                v_out.push(v.max(0.0));
                x_out.push(x);
                iv_out.push(iv);
                iv = 0.0;
                since_record = 0;
            }
        }
    }

    Ok(SimPath {
        v: v_out,
        x: x_out,
        iv: iv_out,
        dt: dt * cfg.record_every as f64,
        mu: params.mu,
    })
}

/// Summary of the per-step residual r = dS/S − d ln S − v·dt/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub max_abs: f64,
    pub mean: f64,
    pub rms: f64,
}

/// Residual of the price identity dS/S − d ln S = σ²dt/2 along a path, with
/// S reconstructed as S₀·exp(x + μt). `v·dt` is taken from the integrated
/// variance of each stride.
pub fn step_identity_check(path: &SimPath) -> IdentityResidual {
    let n = path.len().saturating_sub(1);
    if n == 0 {
        return IdentityResidual {
            max_abs: 0.0,
            mean: 0.0,
            rms: 0.0,
        };
    }
    let mut max_abs: f64 = 0.0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..n {
        let dlog = path.x[i + 1] - path.x[i] + path.mu * path.dt;
        let ds_over_s = dlog.exp_m1();
        let r = ds_over_s - dlog - 0.5 * path.iv[i + 1];
        max_abs = max_abs.max(r.abs());
        sum += r;
        sum_sq += r * r;
    }
    IdentityResidual {
        max_abs,
        mean: sum / n as f64,
        rms: (sum_sq / n as f64).sqrt(),
    }
}

/// τ-day returns z_i = x(t_i + τ) − x(t_i) from a path whose record spacing
/// divides one day. Overlapping returns start every day, otherwise every τ days.
pub fn returns_at_lag(path: &SimPath, tau_days: u32, overlapping: bool) -> Result<ReturnSeries> {
    if tau_days == 0 {
        return Err(Error::InvalidConfig("tau must be at least one day".into()));
    }
    let per_day = path.records_per_day()?;
    let lag = tau_days as usize * per_day;
    if path.len() <= lag {
        return Err(Error::InsufficientData {
            needed: lag + 1,
            got: path.len(),
        });
    }
    let stride = if overlapping { per_day } else { lag };
    let z = (0..path.len() - lag)
        .step_by(stride)
        .map(|i| path.x[i + lag] - path.x[i])
        .collect();
    Ok(ReturnSeries::new(z, tau_days, 1.0, 0.0, overlapping))
}

/// Ito coefficients equivalent to reading the variance SDE in the Stratonovich sense.
///
/// The Ito drift gains ½·g·g' = κ_M²v/2 + κ_H²/4 with g² = κ_M²v² + κ_H²v, so
/// γ' = γ − κ_M²/2 and γ'θ' = γθ + κ_H²/4. In the HM limit only θ moves; in
/// the MM limit γ moves while γθ is unchanged.
pub fn stratonovich_to_ito(params: &ModelParams) -> Result<ModelParams> {
    params.validate()?;
    let gamma = params.gamma - 0.5 * params.kappa_m_sq();
    if !(gamma > 0.0) {
        return Err(Error::domain(format!(
            "Stratonovich reading requires gamma > kappa_M^2/2 ({} vs {})",
            params.gamma,
            0.5 * params.kappa_m_sq()
        )));
    }
    let theta = (params.gamma * params.theta + 0.25 * params.kappa_h_sq()) / gamma;
    Ok(ModelParams {
        gamma,
        theta,
        ..*params
    })
}
