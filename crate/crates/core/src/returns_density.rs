//! Return densities: the closed-form MHM law and numeric normal-variance
//! mixtures for all three models, their CDFs and even moments.
//!
//! A τ-day return is modelled as z | v ~ N(0, vτ) with v drawn from the
//! stationary variance law (volatility treated as quasi-static over τ).

use std::f64::consts::{LN_2, PI};

use crate::distributions::{BetaPrimeParams, GammaParams, InverseGammaParams, VarianceLaw};
use crate::error::{Error, Result};
use crate::special::{
    incomplete_gamma_pair, integrate_exp, kummer_u_at_zero, ln_beta, ln_gamma_pos,
    ln_gamma_times_u, QuadratureConfig,
};

/// Variance law plus return horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnDensitySpec {
    pub law: VarianceLaw,
    /// Horizon in days.
    pub tau: f64,
}

impl ReturnDensitySpec {
    pub fn new(law: VarianceLaw, tau: f64) -> Result<Self> {
        let spec = Self { law, tau };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::domain(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        match &self.law {
            VarianceLaw::BetaPrime(bp) => bp.validate(),
            VarianceLaw::Gamma(g) => GammaParams::new(g.alpha, g.theta).map(|_| ()),
            VarianceLaw::InverseGamma(g) => InverseGammaParams::new(g.alpha, g.theta).map(|_| ()),
        }
    }

    /// Typical return size √(E[v]·τ).
    pub fn scale(&self) -> f64 {
        (self.law.mean() * self.tau).sqrt()
    }

    /// Whether the density is unbounded at z = 0 (f(v) ∝ v^k near 0 with k ≤ −½).
    pub fn singular_at_origin(&self) -> bool {
        self.law.small_v_exponent() <= -0.5
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::domain(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

/// Closed-form MHM return density
/// ψ(z) = Γ(q+½)·U(q+½, 3/2−p, z²/(2βτ)) / (√(2πβτ)·B(p,q)).
///
/// At z = 0 the density is finite only for p > ½; otherwise `f64::MAX` marks
/// the (integrable) singularity.
pub fn mhm_return_pdf(z: f64, bp: &BetaPrimeParams, tau: f64) -> Result<f64> {
    mhm_return_pdf_with(z, bp, tau, &QuadratureConfig::default())
}

pub fn mhm_return_pdf_with(
    z: f64,
    bp: &BetaPrimeParams,
    tau: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    bp.validate()?;
    check_tau(tau)?;
    if !z.is_finite() {
        return Err(Error::domain(format!("z must be finite, got {z}")));
    }
    let bt = bp.beta * tau;
    let norm = 0.5 * (2.0 * PI * bt).ln() + ln_beta(bp.p, bp.q)?;
    let a = bp.q + 0.5;
    let b = 1.5 - bp.p;
    let x = z * z / (2.0 * bt);
    if x == 0.0 {
        if bp.p <= 0.5 {
            return Ok(f64::MAX);
        }
        let u0 = kummer_u_at_zero(a, b)?;
        return Ok((ln_gamma_pos(a) + u0.ln() - norm).exp());
    }
    Ok((ln_gamma_times_u(a, b, x, cfg)? - norm).exp())
}

/// Log-variance substitution v = v_ref·e^{2u}; returns (v, ln(dv/du)).
fn variance_at(u: f64, v_ref: f64) -> (f64, f64) {
    let v = v_ref * (2.0 * u).exp();
    (v, LN_2 + v.ln())
}

fn reference_variance(law: &VarianceLaw) -> f64 {
    match law {
        VarianceLaw::BetaPrime(bp) => bp.beta,
        other => other.mean(),
    }
}

/// Product-distribution density ∫ f(v)·N(z; 0, vτ) dv, by quadrature in
/// u = ln(σ/σ_ref).
pub fn pd_return_pdf(z: f64, spec: &ReturnDensitySpec) -> Result<f64> {
    pd_return_pdf_with(z, spec, &QuadratureConfig::default())
}

pub fn pd_return_pdf_with(z: f64, spec: &ReturnDensitySpec, cfg: &QuadratureConfig) -> Result<f64> {
    spec.validate()?;
    if !z.is_finite() {
        return Err(Error::domain(format!("z must be finite, got {z}")));
    }
    if z == 0.0 && spec.singular_at_origin() {
        return Ok(f64::MAX);
    }
    let tau = spec.tau;
    let law = spec.law;
    let v_ref = reference_variance(&law);
    let z2 = z * z;
    let h = |u: f64| {
        let (v, ln_jac) = variance_at(u, v_ref);
        if !(v > 0.0) || !v.is_finite() {
            return f64::NEG_INFINITY;
        }
        law.ln_pdf(v) + ln_jac - 0.5 * (2.0 * PI * v * tau).ln() - z2 / (2.0 * v * tau)
    };
    let start = 0.25 * (z2 / (v_ref * tau)).max(1.0).ln();
    let est = integrate_exp(h, start, 0.5, cfg)?;
    Ok(est.ln_value.exp())
}

/// Density for any model: the closed form for MHM, the mixture integral otherwise.
pub fn return_pdf(z: f64, spec: &ReturnDensitySpec) -> Result<f64> {
    return_pdf_with(z, spec, &QuadratureConfig::default())
}

pub fn return_pdf_with(z: f64, spec: &ReturnDensitySpec, cfg: &QuadratureConfig) -> Result<f64> {
    match &spec.law {
        VarianceLaw::BetaPrime(bp) => mhm_return_pdf_with(z, bp, spec.tau, cfg),
        _ => pd_return_pdf_with(z, spec, cfg),
    }
}

/// P(Z ≤ z).
///
/// Exchanging the order of integration gives
/// F(z) = ½ + sign(z)·∫ f(v)·½erf(|z|/√(2vτ)) dv, a single smooth integral
/// over v instead of a nested one over z.
pub fn return_cdf(z: f64, spec: &ReturnDensitySpec) -> Result<f64> {
    return_cdf_with(z, spec, &QuadratureConfig::default())
}

pub fn return_cdf_with(z: f64, spec: &ReturnDensitySpec, cfg: &QuadratureConfig) -> Result<f64> {
    spec.validate()?;
    if z.is_nan() {
        return Err(Error::domain("z must not be NaN"));
    }
    if z == 0.0 {
        return Ok(0.5);
    }
    if z.is_infinite() {
        return Ok(if z > 0.0 { 1.0 } else { 0.0 });
    }
    let half_mass = half_mass(z.abs(), spec, cfg)?;
    let f = if z > 0.0 {
        0.5 + half_mass
    } else {
        0.5 - half_mass
    };
    Ok(f.clamp(0.0, 1.0))
}

/// P(0 < Z ≤ a) for a > 0.
fn half_mass(a: f64, spec: &ReturnDensitySpec, cfg: &QuadratureConfig) -> Result<f64> {
    let tau = spec.tau;
    let law = spec.law;
    let v_ref = reference_variance(&law);
    let h = |u: f64| {
        let (v, ln_jac) = variance_at(u, v_ref);
        if !(v > 0.0) || !v.is_finite() {
            return f64::NEG_INFINITY;
        }
        let x2 = a * a / (2.0 * v * tau);
        // ½erf(x) = ½P(½, x²)
        let p = match incomplete_gamma_pair(0.5, x2) {
            Ok((p, _)) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        law.ln_pdf(v) + ln_jac + (0.5 * p).ln()
    };
    let est = integrate_exp(h, 0.0, 0.5, cfg)?;
    Ok(est.ln_value.exp().min(0.5))
}

/// E[z²] (n = 1) or E[z⁴] (n = 2) of the MHM return law.
pub fn mhm_even_moment(n: u32, bp: &BetaPrimeParams, tau: f64) -> Result<f64> {
    bp.validate()?;
    check_tau(tau)?;
    let (p, q, bt) = (bp.p, bp.q, bp.beta * tau);
    match n {
        1 if q > 1.0 => Ok(p * bt / (q - 1.0)),
        2 if q > 2.0 => Ok(3.0 * p * (p + 1.0) * bt * bt / ((q - 1.0) * (q - 2.0))),
        1 | 2 => Err(Error::MomentDoesNotExist { order: n, limit: q }),
        _ => Err(Error::domain(format!(
            "only n = 1 or 2 is supported, got {n}"
        ))),
    }
}

/// E[z^{2n}] = (2n−1)!!·τⁿ·E[vⁿ] for any of the models.
pub fn return_even_moment(n: u32, spec: &ReturnDensitySpec) -> Result<f64> {
    spec.validate()?;
    let double_factorial: f64 = (1..=n).map(|k| f64::from(2 * k - 1)).product();
    Ok(double_factorial * spec.tau.powi(n as i32) * spec.law.moment(n)?)
}

/// (empirical/theoretical)^{1/2n}; unity when data match the model.
/// Non-positive inputs yield NaN.
pub fn reduced_moment(empirical_z2n: f64, theoretical_z2n: f64, n: u32) -> f64 {
    if !(empirical_z2n > 0.0) || !(theoretical_z2n > 0.0) || n == 0 {
        return f64::NAN;
    }
    (empirical_z2n / theoretical_z2n).powf(1.0 / f64::from(2 * n))
}

/// Density and CDF sampled on a z-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub z: Vec<f64>,
    pub pdf: Vec<f64>,
    pub cdf: Vec<f64>,
}

pub fn density_table(spec: &ReturnDensitySpec, z_grid: &[f64]) -> Result<DensityTable> {
    let mut pdf = Vec::with_capacity(z_grid.len());
    let mut cdf = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        pdf.push(return_pdf(z, spec)?);
        cdf.push(return_cdf(z, spec)?);
    }
    Ok(DensityTable {
        z: z_grid.to_vec(),
        pdf,
        cdf,
    })
}

/// Evenly spaced grid of `n` points on [−half_width, half_width].
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0];
    }
    let step = 2.0 * half_width / (n - 1) as f64;
    (0..n).map(|i| -half_width + step * i as f64).collect()
}

/// Piecewise-cubic Hermite interpolant of the CDF, built once per parameter
/// set so that goodness-of-fit statistics over large samples stay cheap.
///
/// Nodes are sinh-spaced on [0, z_max]; beyond z_max the exact CDF is used.
#[derive(Debug, Clone)]
pub struct CdfTable {
    spec: ReturnDensitySpec,
    cfg: QuadratureConfig,
    z: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
    singular: bool,
}

impl CdfTable {
    pub const DEFAULT_NODES: usize = 96;
    /// Upper end of the table in units of √(E[v]τ).
    const SPAN: f64 = 40.0;

    pub fn new(spec: &ReturnDensitySpec, nodes: usize, cfg: &QuadratureConfig) -> Result<Self> {
        spec.validate()?;
        let nodes = nodes.max(8);
        let s = spec.scale();
        let singular = spec.singular_at_origin();
        // A cusp at the origin needs the nodes packed tighter there.
        let c = if singular { 0.02 * s } else { 0.5 * s };
        let h = (Self::SPAN * s / c).asinh() / (nodes - 1) as f64;
        let z: Vec<f64> = (0..nodes).map(|k| c * (h * k as f64).sinh()).collect();
        let mut cdf = Vec::with_capacity(nodes);
        let mut pdf = Vec::with_capacity(nodes);
        for &zk in &z {
            cdf.push(return_cdf_with(zk, spec, cfg)?);
            pdf.push(if zk == 0.0 && singular {
                f64::NAN
            } else {
                return_pdf_with(zk, spec, cfg)?
            });
        }
        Ok(Self {
            spec: *spec,
            cfg: *cfg,
            z,
            cdf,
            pdf,
            singular,
        })
    }

    pub fn spec(&self) -> &ReturnDensitySpec {
        &self.spec
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        let a = z.abs();
        let z_max = *self.z.last().expect("nonempty table");
        if a >= z_max || z.is_nan() {
            return return_cdf_with(z, &self.spec, &self.cfg);
        }
        let upper = self.upper_cdf(a);
        Ok(if z >= 0.0 { upper } else { 1.0 - upper })
    }

    /// ln pdf, linear in ln pdf between nodes; exact off the table and in
    /// the first cell when the origin is singular.
    pub fn ln_pdf(&self, z: f64) -> Result<f64> {
        let a = z.abs();
        let z_max = *self.z.last().expect("nonempty table");
        if a >= z_max || z.is_nan() || (self.singular && a < self.z[1]) {
            return Ok(return_pdf_with(z, &self.spec, &self.cfg)?.ln());
        }
        let k = self.z.partition_point(|&x| x <= a).saturating_sub(1);
        let t = (a - self.z[k]) / (self.z[k + 1] - self.z[k]);
        let (l0, l1) = (self.pdf[k].ln(), self.pdf[k + 1].ln());
        Ok(l0 + t * (l1 - l0))
    }

    fn upper_cdf(&self, a: f64) -> f64 {
        let k = self.z.partition_point(|&x| x <= a).saturating_sub(1);
        let (z0, z1) = (self.z[k], self.z[k + 1]);
        let (f0, f1) = (self.cdf[k], self.cdf[k + 1]);
        let w = z1 - z0;
        let t = (a - z0) / w;
        if k == 0 && self.singular {
            // Infinite slope at the origin; fall back to linear interpolation.
            return f0 + t * (f1 - f0);
        }
        let (d0, d1) = (self.pdf[k] * w, self.pdf[k + 1] * w);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1).clamp(0.0, 1.0)
    }
}
