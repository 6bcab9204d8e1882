//! Fitting variance laws to return samples and estimating γ.

mod autocov;
mod ks;
mod simplex;

pub use autocov::{
    empirical_variance_moments, fit_gamma_curve, fit_gamma_from_autocov, kappas_from_fit,
    squared_return_autocov, GammaFit, VarianceMoments,
};
pub use ks::ks_statistic;
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data_io::ReturnSeries;
use crate::distributions::{
    BetaPrimeParams, GammaParams, InverseGammaParams, ModelKind, VarianceLaw,
};
use crate::error::{Error, Result};
use crate::returns_density::{CdfTable, ReturnDensitySpec};
use crate::special::QuadratureConfig;

/// Smallest sample accepted by [`fit_returns`].
pub const MIN_FIT_SAMPLES: usize = 50;
/// Below this the fit runs but is statistically unreliable.
pub const RECOMMENDED_FIT_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Minimize the KS distance.
    #[default]
    Ks,
    /// Maximize the likelihood.
    Mle,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ks" => Ok(Objective::Ks),
            "mle" => Ok(Objective::Mle),
            other => Err(Error::InvalidConfig(format!(
                "unknown objective '{other}' (expected ks or mle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub objective: Objective,
    /// Number of simplex starts; the first is the unperturbed initializer.
    pub restarts: usize,
    /// Seed for the jittered starts.
    pub seed: u64,
    pub simplex: SimplexOptions,
    pub table_nodes: usize,
    pub quadrature: QuadratureConfig,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            objective: Objective::Ks,
            restarts: 3,
            seed: 0,
            simplex: SimplexOptions::default(),
            table_nodes: CdfTable::DEFAULT_NODES,
            quadrature: QuadratureConfig {
                abs_tol: 1e-12,
                rel_tol: 1e-9,
                max_subdivisions: 200,
            },
        }
    }
}

/// Outcome of [`fit_returns`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: ModelKind,
    pub law: VarianceLaw,
    pub ks: f64,
    pub n: usize,
    /// Return horizon in days.
    pub tau: f64,
    pub converged: bool,
    pub objective_evals: usize,
    /// Attached afterwards (e.g. from the autocovariance fit) to derive κ².
    pub gamma: Option<f64>,
}

impl FitResult {
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn beta_prime(&self) -> Option<BetaPrimeParams> {
        match self.law {
            VarianceLaw::BetaPrime(bp) => Some(bp),
            _ => None,
        }
    }

    /// Shape α of the Ga/IGa laws.
    pub fn alpha(&self) -> Option<f64> {
        match self.law {
            VarianceLaw::Gamma(g) => Some(g.alpha),
            VarianceLaw::InverseGamma(g) => Some(g.alpha),
            VarianceLaw::BetaPrime(_) => None,
        }
    }

    /// Mean variance θ.
    pub fn theta(&self) -> f64 {
        self.law.mean()
    }

    /// (κ_M², κ_H²) implied by the fitted law and γ. The single-noise models
    /// report zero for the amplitude they lack.
    pub fn kappa_sq(&self) -> Option<(f64, f64)> {
        let gamma = self.gamma?;
        match self.law {
            VarianceLaw::BetaPrime(bp) => kappas_from_fit(&bp, gamma).ok(),
            VarianceLaw::Gamma(g) => Some((0.0, 2.0 * gamma * g.theta / g.alpha)),
            VarianceLaw::InverseGamma(g) => Some((2.0 * gamma * g.theta / g.alpha, 0.0)),
        }
    }

    pub fn density_spec(&self) -> Result<ReturnDensitySpec> {
        ReturnDensitySpec::new(self.law, self.tau)
    }
}

/// Free coordinates of each model, all unconstrained.
fn law_from_coords(model: ModelKind, x: &[f64]) -> Result<VarianceLaw> {
    if x.iter().any(|c| !c.is_finite() || c.abs() > 40.0) {
        return Err(Error::domain("fit coordinates out of range"));
    }
    Ok(match model {
        ModelKind::Mhm => VarianceLaw::BetaPrime(BetaPrimeParams::new(
            x[0].exp(),
            1.0 + x[1].exp(),
            x[2].exp(),
        )?),
        ModelKind::Hm => VarianceLaw::Gamma(GammaParams::new(1.0 + x[0].exp(), x[1].exp())?),
        ModelKind::Mm => {
            let theta = x[1].exp();
            VarianceLaw::InverseGamma(InverseGammaParams::new(theta * x[0].exp(), theta)?)
        }
    })
}

/// Starting point: θ from the sample second moment, moderate shapes.
fn initial_coords(model: ModelKind, theta0: f64) -> Vec<f64> {
    let lt = theta0.ln();
    match model {
        // p = 2, q = 3, β = θ (mean pβ/(q−1) = θ).
        ModelKind::Mhm => vec![2f64.ln(), 2f64.ln(), lt],
        // α = 2.
        ModelKind::Hm => vec![0.0, lt],
        // shape α/θ + 1 = 3.
        ModelKind::Mm => vec![2f64.ln(), lt],
    }
}

/// Fit the variance law of `model` to the returns `z`.
pub fn fit_returns(z: &ReturnSeries, model: ModelKind, opts: &FitOptions) -> Result<FitResult> {
    let n = z.n();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: n,
        });
    }
    if z.z.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("returns must be finite"));
    }
    let tau = z.horizon();
    if !(tau > 0.0) {
        return Err(Error::domain(format!(
            "return horizon must be positive, got {tau}"
        )));
    }
    opts.quadrature.validate()?;
    let mut sorted = z.z.clone();
    sorted.sort_by(f64::total_cmp);
    let second = sorted.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if !(second > 0.0) {
        return Err(Error::DegenerateData("all returns are zero".into()));
    }
    let theta0 = second / tau;

    let table_for = |x: &[f64]| -> Result<CdfTable> {
        let law = law_from_coords(model, x)?;
        let spec = ReturnDensitySpec::new(law, tau)?;
        CdfTable::new(&spec, opts.table_nodes, &opts.quadrature)
    };
    let objective = |x: &[f64]| -> f64 {
        let table = match table_for(x) {
            Ok(t) => t,
            Err(_) => return f64::NAN,
        };
        match opts.objective {
            Objective::Ks => ks_statistic(&sorted, |v| table.cdf(v)).unwrap_or(f64::NAN),
            Objective::Mle => {
                let mut total = 0.0;
                for &v in &sorted {
                    if v == 0.0 && table.spec().singular_at_origin() {
                        continue;
                    }
                    match table.ln_pdf(v) {
                        Ok(l) => total -= l,
                        Err(_) => return f64::NAN,
                    }
                }
                total / n as f64
            }
        }
    };

    let x0 = initial_coords(model, theta0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<SimplexResult> = None;
    let mut evals = 0;
    for start in 0..opts.restarts.max(1) {
        let xs: Vec<f64> = if start == 0 {
            x0.clone()
        } else {
            x0.iter().map(|c| c + rng.random_range(-0.5..0.5)).collect()
        };
        let run = nelder_mead(objective, &xs, &opts.simplex);
        evals += run.evals;
        if best.as_ref().is_none_or(|b| run.f < b.f) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    if !best.f.is_finite() {
        return Err(Error::FitFailure(format!(
            "{model} objective was not finite anywhere the simplex visited"
        )));
    }
    let law = law_from_coords(model, &best.x)?;
    let ks = match opts.objective {
        Objective::Ks => best.f,
        Objective::Mle => {
            let table = table_for(&best.x)?;
            ks_statistic(&sorted, |v| table.cdf(v))?
        }
    };
    Ok(FitResult {
        model,
        law,
        ks,
        n,
        tau,
        converged: best.converged,
        objective_evals: evals,
        gamma: None,
    })
}
