//! Confluent hypergeometric function of the second kind, U(a, b, z).
//!
//! Evaluated from the integral representation
//!
//! ```text
//! U(a, b, z) = 1/Γ(a) ∫₀^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt,   a > 0, z > 0
//! ```
//!
//! after the substitution t = eˢ, which turns the algebraic end behaviour
//! into exponential decay and makes the log-integrand
//! `a·s + (b−a−1)·ln(1+eˢ) − z·eˢ` concave whenever b ≤ a + 1.

use super::gamma::ln_gamma_pos;
use super::quadrature::{integrate_exp, QuadratureConfig};
use crate::error::{Error, Result};

/// ln(1 + eˢ) without overflow.
pub(crate) fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// U(a, b, z) for a > 0, z > 0 and any real b.
pub fn kummer_u(a: f64, b: f64, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_kummer_u(a, b, z, cfg)?.exp())
}

/// ln U(a, b, z). U is positive on the supported domain, so the log is always defined.
pub fn ln_kummer_u(a: f64, b: f64, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_gamma_times_u(a, b, z, cfg)? - ln_gamma_pos(a))
}

/// ln(Γ(a)·U(a, b, z)), i.e. the log of the bare integral. Callers that
/// multiply U by Γ(a) anyway (the return density does) skip a cancellation.
pub fn ln_gamma_times_u(a: f64, b: f64, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("kummer_u requires a > 0, got {a}")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!(
            "kummer_u requires finite z > 0, got {z}"
        )));
    }
    if !b.is_finite() {
        return Err(Error::domain(format!(
            "kummer_u requires finite b, got {b}"
        )));
    }
    let c = b - a - 1.0;
    let h = |s: f64| a * s + c * softplus(s) - z * s.exp();
    // Mode of t^{a−1}e^{−zt}(1+t)^{c} sits near t ≈ a/(z − c) for large
    // arguments; only a starting guess is needed.
    let guess = (a / (z + (-c).max(0.0) + 1e-300)).ln().clamp(-700.0, 700.0);
    let scale = (1.0 / a.sqrt()).clamp(1e-3, 1.0);
    let est = integrate_exp(h, guess, scale, cfg)?;
    let tol = cfg.rel_tol.max(1e-10) * 10.0;
    if est.rel_error > tol {
        return Err(Error::Convergence(format!(
            "kummer_u({a}, {b}, {z}) relative error {:e} above tolerance",
            est.rel_error
        )));
    }
    Ok(est.ln_value)
}

/// U(a, b, 0⁺) = Γ(1−b)/Γ(a−b+1), valid for b < 1.
pub fn kummer_u_at_zero(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b < 1.0) {
        return Err(Error::domain(format!(
            "U(a, b, 0) is finite only for a > 0 and b < 1, got a={a}, b={b}"
        )));
    }
    Ok((ln_gamma_pos(1.0 - b) - ln_gamma_pos(a - b + 1.0)).exp())
}
