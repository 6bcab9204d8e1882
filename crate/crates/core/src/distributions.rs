//! Steady-state variance laws of the three volatility models and the maps
//! between SDE coefficients and distribution parameters.
//!
//! | model | variance SDE diffusion | steady state |
//! |-------|------------------------|--------------|
//! | MM    | κ_M·v                  | Inverse Gamma, shape α/θ+1, scale α, α = 2γθ/κ_M² |
//! | HM    | κ_H·√v                 | Gamma, shape α, mean θ, α = 2γθ/κ_H² |
//! | MHM   | √(κ_M²v² + κ_H²v)      | Beta Prime (p, q, β) |

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::special::{incomplete_gamma_pair, ln_beta, ln_gamma_pos, reg_incomplete_beta};

/// Which variance model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Multiplicative model.
    Mm,
    /// Heston model.
    Hm,
    /// Combined multiplicative-Heston model.
    Mhm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Mm, ModelKind::Hm, ModelKind::Mhm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Mm => "mm",
            ModelKind::Hm => "hm",
            ModelKind::Mhm => "mhm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mm" => Ok(ModelKind::Mm),
            "hm" => Ok(ModelKind::Hm),
            "mhm" => Ok(ModelKind::Mhm),
            other => Err(Error::InvalidConfig(format!(
                "unknown model '{other}' (expected mm, hm or mhm)"
            ))),
        }
    }
}

/// SDE coefficients. Time is measured in days, variance in squared daily return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Relaxation rate γ (1/day).
    pub gamma: f64,
    /// Long-run mean variance θ.
    pub theta: f64,
    /// Multiplicative noise amplitude κ_M (1/√day).
    pub kappa_m: f64,
    /// Heston noise amplitude κ_H.
    pub kappa_h: f64,
    /// Correlation between price and variance noise.
    pub rho: f64,
    /// Price drift μ (1/day).
    pub mu: f64,
}

impl ModelParams {
    /// Build from squared noise amplitudes, ρ = μ = 0.
    pub fn from_squares(gamma: f64, theta: f64, kappa_m_sq: f64, kappa_h_sq: f64) -> Result<Self> {
        if kappa_m_sq < 0.0 || kappa_h_sq < 0.0 {
            return Err(Error::domain(
                "squared noise amplitudes must be nonnegative",
            ));
        }
        let p = Self {
            gamma,
            theta,
            kappa_m: kappa_m_sq.sqrt(),
            kappa_h: kappa_h_sq.sqrt(),
            rho: 0.0,
            mu: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn kappa_m_sq(&self) -> f64 {
        self.kappa_m * self.kappa_m
    }

    pub fn kappa_h_sq(&self) -> f64 {
        self.kappa_h * self.kappa_h
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.gamma,
            self.theta,
            self.kappa_m,
            self.kappa_h,
            self.rho,
            self.mu,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::domain("model parameters must be finite"));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::domain(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.theta > 0.0) {
            return Err(Error::domain(format!(
                "theta must be > 0, got {}",
                self.theta
            )));
        }
        if self.kappa_m < 0.0 || self.kappa_h < 0.0 {
            return Err(Error::domain("noise amplitudes must be nonnegative"));
        }
        if self.kappa_m == 0.0 && self.kappa_h == 0.0 {
            return Err(Error::DegenerateModel(
                "kappa_M and kappa_H cannot both be zero".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::domain(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// Whether the fourth moment of returns is finite (2γ > κ_M²).
    pub fn has_finite_fourth_moment(&self) -> bool {
        2.0 * self.gamma > self.kappa_m_sq()
    }

    /// Steady-state variance law of `model` driven by these coefficients.
    /// MM ignores κ_H and HM ignores κ_M.
    pub fn steady_state(&self, model: ModelKind) -> Result<VarianceLaw> {
        self.validate()?;
        match model {
            ModelKind::Mm => {
                if self.kappa_m == 0.0 {
                    return Err(Error::DegenerateModel("MM requires kappa_M > 0".into()));
                }
                let alpha = 2.0 * self.gamma * self.theta / self.kappa_m_sq();
                Ok(VarianceLaw::InverseGamma(InverseGammaParams::new(
                    alpha, self.theta,
                )?))
            }
            ModelKind::Hm => {
                if self.kappa_h == 0.0 {
                    return Err(Error::DegenerateModel("HM requires kappa_H > 0".into()));
                }
                let alpha = 2.0 * self.gamma * self.theta / self.kappa_h_sq();
                Ok(VarianceLaw::Gamma(GammaParams::new(alpha, self.theta)?))
            }
            ModelKind::Mhm => Ok(VarianceLaw::BetaPrime(bp_from_model(self)?)),
        }
    }
}

/// Beta Prime shape/scale triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPrimeParams {
    /// Small-v shape: density ∝ v^{p−1} for v ≪ β.
    pub p: f64,
    /// Tail shape: density ∝ v^{−q−1} for v ≫ β.
    pub q: f64,
    /// Scale β.
    pub beta: f64,
}

impl BetaPrimeParams {
    pub fn new(p: f64, q: f64, beta: f64) -> Result<Self> {
        let bp = Self { p, q, beta };
        bp.validate()?;
        Ok(bp)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        if !(self.q > 1.0) {
            return Err(Error::domain(format!(
                "q must be > 1 for a finite mean, got {}",
                self.q
            )));
        }
        Ok(())
    }

    /// The density alone only needs q > 0.
    fn validate_shape(&self) -> Result<()> {
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(Error::domain(format!("p must be > 0, got {}", self.p)));
        }
        if !(self.q > 0.0) || !self.q.is_finite() {
            return Err(Error::domain(format!("q must be > 0, got {}", self.q)));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::domain(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Mean pβ/(q−1), which equals θ under the parameter map.
    pub fn mean(&self) -> f64 {
        self.p * self.beta / (self.q - 1.0)
    }
}

/// HM steady state: Gamma with shape α and mean θ (scale θ/α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub alpha: f64,
    pub theta: f64,
}

impl GammaParams {
    /// Requires α > 1 (the HM regime) and θ > 0.
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::domain(format!(
                "HM shape alpha must be > 1, got {alpha}"
            )));
        }
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::domain(format!("theta must be > 0, got {theta}")));
        }
        Ok(Self { alpha, theta })
    }

    pub fn shape(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.theta / self.alpha
    }
}

/// MM steady state: Inverse Gamma with shape α/θ+1 and scale α (mean θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGammaParams {
    pub alpha: f64,
    pub theta: f64,
}

impl InverseGammaParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
        }
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::domain(format!("theta must be > 0, got {theta}")));
        }
        Ok(Self { alpha, theta })
    }

    /// α/θ + 1, which plays the role of q in the Beta Prime tail.
    pub fn shape(&self) -> f64 {
        self.alpha / self.theta + 1.0
    }

    pub fn scale(&self) -> f64 {
        self.alpha
    }
}

/// (p, q, β) from the MHM coefficients: p = 2γθ/κ_H², q = 1 + 2γ/κ_M², β = κ_H²/κ_M².
pub fn bp_from_model(params: &ModelParams) -> Result<BetaPrimeParams> {
    params.validate()?;
    if params.kappa_m == 0.0 || params.kappa_h == 0.0 {
        return Err(Error::DegenerateModel(
            "Beta Prime steady state needs kappa_M > 0 and kappa_H > 0; use the Ga/IGa limit"
                .into(),
        ));
    }
    let km2 = params.kappa_m_sq();
    let kh2 = params.kappa_h_sq();
    BetaPrimeParams::new(
        2.0 * params.gamma * params.theta / kh2,
        1.0 + 2.0 * params.gamma / km2,
        kh2 / km2,
    )
}

/// Inverse map given γ: κ_M² = 2γ/(q−1), κ_H² = β·κ_M², θ = pβ/(q−1).
pub fn model_from_bp(bp: &BetaPrimeParams, gamma: f64, rho: f64, mu: f64) -> Result<ModelParams> {
    bp.validate()?;
    if !(gamma > 0.0) {
        return Err(Error::domain(format!("gamma must be > 0, got {gamma}")));
    }
    let km2 = 2.0 * gamma / (bp.q - 1.0);
    let kh2 = bp.beta * km2;
    let params = ModelParams {
        gamma,
        theta: bp.mean(),
        kappa_m: km2.sqrt(),
        kappa_h: kh2.sqrt(),
        rho,
        mu,
    };
    params.validate()?;
    Ok(params)
}

/// Beta Prime density, defined for any q > 0. At v = 0 returns 0 for p > 1, q/β for p = 1 and
/// `f64::MAX` as a divergence marker for p < 1.
pub fn bp_pdf(v: f64, bp: &BetaPrimeParams) -> Result<f64> {
    bp.validate_shape()?;
    if !(v >= 0.0) {
        return Err(Error::domain(format!("bp_pdf requires v >= 0, got {v}")));
    }
    if v == 0.0 {
        return Ok(if bp.p > 1.0 {
            0.0
        } else if bp.p == 1.0 {
            (-ln_beta(bp.p, bp.q)?).exp() / bp.beta
        } else {
            f64::MAX
        });
    }
    Ok(bp_ln_pdf(v, bp).exp())
}

pub(crate) fn bp_ln_pdf(v: f64, bp: &BetaPrimeParams) -> f64 {
    let x = v / bp.beta;
    -(bp.p + bp.q) * x.ln_1p() + (bp.p - 1.0) * x.ln()
        - bp.beta.ln()
        - ln_beta(bp.p, bp.q).expect("validated shapes")
}

/// Beta Prime CDF through I_x(p, q) with x = v/(v+β).
pub fn bp_cdf(v: f64, bp: &BetaPrimeParams) -> Result<f64> {
    bp.validate_shape()?;
    if !(v >= 0.0) {
        return Err(Error::domain(format!("bp_cdf requires v >= 0, got {v}")));
    }
    if v.is_infinite() {
        return Ok(1.0);
    }
    let denom = v + bp.beta;
    reg_incomplete_beta(bp.p, bp.q, v / denom, bp.beta / denom)
}

/// E[vⁿ] = βⁿ ∏_{k<n} (p+k)/(q−1−k), defined for n < q.
pub fn bp_moment(n: u32, bp: &BetaPrimeParams) -> Result<f64> {
    bp.validate()?;
    if n == 0 {
        return Ok(1.0);
    }
    if f64::from(n) >= bp.q {
        return Err(Error::MomentDoesNotExist {
            order: n,
            limit: bp.q,
        });
    }
    Ok((0..n)
        .map(|k| bp.beta * (bp.p + f64::from(k)) / (bp.q - 1.0 - f64::from(k)))
        .product())
}

/// HM steady-state density.
pub fn ga_pdf(v: f64, g: &GammaParams) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("ga_pdf requires v >= 0, got {v}")));
    }
    if v == 0.0 {
        // α > 1 by construction.
        return Ok(0.0);
    }
    Ok(ga_ln_pdf(v, g).exp())
}

pub(crate) fn ga_ln_pdf(v: f64, g: &GammaParams) -> f64 {
    let k = g.shape();
    let s = g.scale();
    (k - 1.0) * v.ln() - v / s - k * s.ln() - ln_gamma_pos(k)
}

pub fn ga_cdf(v: f64, g: &GammaParams) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("ga_cdf requires v >= 0, got {v}")));
    }
    Ok(incomplete_gamma_pair(g.shape(), v / g.scale())?.0)
}

/// MM steady-state density; v must be strictly positive.
pub fn iga_pdf(v: f64, g: &InverseGammaParams) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("iga_pdf requires v > 0, got {v}")));
    }
    Ok(iga_ln_pdf(v, g).exp())
}

pub(crate) fn iga_ln_pdf(v: f64, g: &InverseGammaParams) -> f64 {
    let a = g.shape();
    let b = g.scale();
    a * b.ln() - ln_gamma_pos(a) - (a + 1.0) * v.ln() - b / v
}

pub fn iga_cdf(v: f64, g: &InverseGammaParams) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("iga_cdf requires v >= 0, got {v}")));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    Ok(incomplete_gamma_pair(g.shape(), g.scale() / v)?.1)
}

/// Density of σ = √v given the density of v: 2σ·f(σ²).
pub fn volatility_pdf<F: Fn(f64) -> f64>(sigma: f64, variance_pdf: F) -> f64 {
    if !(sigma > 0.0) {
        return 0.0;
    }
    2.0 * sigma * variance_pdf(sigma * sigma)
}

/// A steady-state variance law of one of the three models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceLaw {
    BetaPrime(BetaPrimeParams),
    Gamma(GammaParams),
    InverseGamma(InverseGammaParams),
}

impl VarianceLaw {
    pub fn model(&self) -> ModelKind {
        match self {
            VarianceLaw::BetaPrime(_) => ModelKind::Mhm,
            VarianceLaw::Gamma(_) => ModelKind::Hm,
            VarianceLaw::InverseGamma(_) => ModelKind::Mm,
        }
    }

    pub fn pdf(&self, v: f64) -> Result<f64> {
        match self {
            VarianceLaw::BetaPrime(bp) => bp_pdf(v, bp),
            VarianceLaw::Gamma(g) => ga_pdf(v, g),
            VarianceLaw::InverseGamma(g) => {
                if v == 0.0 {
                    Ok(0.0)
                } else {
                    iga_pdf(v, g)
                }
            }
        }
    }

    /// ln f(v) for v > 0, no validation; used inside quadratures.
    pub(crate) fn ln_pdf(&self, v: f64) -> f64 {
        match self {
            VarianceLaw::BetaPrime(bp) => bp_ln_pdf(v, bp),
            VarianceLaw::Gamma(g) => ga_ln_pdf(v, g),
            VarianceLaw::InverseGamma(g) => iga_ln_pdf(v, g),
        }
    }

    pub fn cdf(&self, v: f64) -> Result<f64> {
        match self {
            VarianceLaw::BetaPrime(bp) => bp_cdf(v, bp),
            VarianceLaw::Gamma(g) => ga_cdf(v, g),
            VarianceLaw::InverseGamma(g) => iga_cdf(v, g),
        }
    }

    /// E[vⁿ].
    pub fn moment(&self, n: u32) -> Result<f64> {
        match self {
            VarianceLaw::BetaPrime(bp) => bp_moment(n, bp),
            VarianceLaw::Gamma(g) => Ok((0..n)
                .map(|k| g.scale() * (g.shape() + f64::from(k)))
                .product()),
            VarianceLaw::InverseGamma(g) => {
                let a = g.shape();
                if f64::from(n) >= a {
                    return Err(Error::MomentDoesNotExist { order: n, limit: a });
                }
                Ok((1..=n).map(|k| g.scale() / (a - f64::from(k))).product())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            VarianceLaw::BetaPrime(bp) => bp.mean(),
            VarianceLaw::Gamma(g) => g.theta,
            VarianceLaw::InverseGamma(g) => g.theta,
        }
    }

    /// Exponent k of the small-v behaviour f ∝ v^k (+∞ when f vanishes faster than any power).
    pub fn small_v_exponent(&self) -> f64 {
        match self {
            VarianceLaw::BetaPrime(bp) => bp.p - 1.0,
            VarianceLaw::Gamma(g) => g.shape() - 1.0,
            VarianceLaw::InverseGamma(_) => f64::INFINITY,
        }
    }
}
