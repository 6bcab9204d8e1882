//! Variance moments and the relaxation rate γ from squared-return statistics.

use crate::data_io::ReturnSeries;
use crate::distributions::BetaPrimeParams;
use crate::error::{Error, Result};

/// Moment estimates of the latent variance from daily returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceMoments {
    /// E[v] ≈ mean(z²)/dt.
    pub theta_hat: f64,
    /// E[v²] ≈ mean(z⁴)/(3dt²); the 3 is the Gaussian fourth-moment factor.
    pub ev2_hat: f64,
    /// ev2_hat − theta_hat². Can come out slightly negative from sampling
    /// noise when the variance is (nearly) constant.
    pub var_v_hat: f64,
    pub n: usize,
}

pub fn empirical_variance_moments(z1: &ReturnSeries) -> Result<VarianceMoments> {
    let n = z1.n();
    if n < 100 {
        return Err(Error::InsufficientData {
            needed: 100,
            got: n,
        });
    }
    if !(z1.dt > 0.0) {
        return Err(Error::domain(format!("dt must be positive, got {}", z1.dt)));
    }
    let (mut s2, mut s4) = (0.0, 0.0);
    for z in &z1.z {
        let z2 = z * z;
        s2 += z2;
        s4 += z2 * z2;
    }
    let dt = z1.dt;
    let theta_hat = s2 / n as f64 / dt;
    let ev2_hat = s4 / n as f64 / (3.0 * dt * dt);
    if !(theta_hat > 0.0) || !ev2_hat.is_finite() {
        return Err(Error::DegenerateData(
            "returns have zero or non-finite second moment".into(),
        ));
    }
    Ok(VarianceMoments {
        theta_hat,
        ev2_hat,
        var_v_hat: ev2_hat - theta_hat * theta_hat,
        n,
    })
}

/// Exponential fit of the variance autocovariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaFit {
    pub gamma: f64,
    pub theta_hat: f64,
    pub var_v_hat: f64,
    pub lag_range: (usize, usize),
    pub sse: f64,
}

/// Mean of z²_t·z²_{t+k}/dt² for each lag k in `lags`.
pub fn squared_return_autocov(z1: &ReturnSeries, lags: (usize, usize)) -> Result<Vec<f64>> {
    let (lo, hi) = lags;
    if lo < 1 || hi < lo {
        return Err(Error::InvalidConfig(format!(
            "lag range must satisfy 1 <= min <= max, got ({lo}, {hi})"
        )));
    }
    let n = z1.n();
    if n < 10 * hi {
        return Err(Error::InsufficientData {
            needed: 10 * hi,
            got: n,
        });
    }
    let dt2 = z1.dt * z1.dt;
    let sq: Vec<f64> = z1.z.iter().map(|z| z * z).collect();
    Ok((lo..=hi)
        .map(|k| {
            let m = n - k;
            let s: f64 = sq[..m].iter().zip(&sq[k..]).map(|(a, b)| a * b).sum();
            s / m as f64 / dt2
        })
        .collect())
}

/// Fit E[v_t v_{t+k}] = θ̂² + V·e^{−γk} over lags k ≥ 1.
///
/// Only same-time products carry the extra Gaussian contact term, so lag 0
/// is never used.
pub fn fit_gamma_from_autocov(z1: &ReturnSeries, lag_range: (usize, usize)) -> Result<GammaFit> {
    let theta_hat = empirical_variance_moments(z1)?.theta_hat;
    let cov = squared_return_autocov(z1, lag_range)?;
    let lags: Vec<f64> = (lag_range.0..=lag_range.1).map(|k| k as f64).collect();
    let mut fit = fit_gamma_curve(&lags, &cov, theta_hat)?;
    fit.lag_range = lag_range;
    Ok(fit)
}

/// Least-squares γ for a given curve C(k) and baseline θ̂. For fixed γ the
/// amplitude V is linear and solved in closed form; γ is found by a log-grid
/// scan followed by golden-section refinement.
pub fn fit_gamma_curve(lags: &[f64], cov: &[f64], theta_hat: f64) -> Result<GammaFit> {
    if lags.len() != cov.len() || lags.len() < 2 {
        return Err(Error::InvalidConfig(
            "need at least two lags with matching covariance values".into(),
        ));
    }
    let excess: Vec<f64> = cov.iter().map(|c| c - theta_hat * theta_hat).collect();
    if excess.iter().all(|e| !(*e > 0.0)) {
        return Err(Error::FitFailure(
            "variance autocovariance is non-positive at every lag".into(),
        ));
    }
    let solve = |ln_g: f64| -> (f64, f64) {
        let g = ln_g.exp();
        let (mut se, mut ee) = (0.0, 0.0);
        for (k, y) in lags.iter().zip(&excess) {
            let e = (-g * k).exp();
            se += e * y;
            ee += e * e;
        }
        let amp = if ee > 0.0 { se / ee } else { 0.0 };
        let sse: f64 = lags
            .iter()
            .zip(&excess)
            .map(|(k, y)| (y - amp * (-g * k).exp()).powi(2))
            .sum();
        (amp, sse)
    };

    let (lo, hi) = (1e-5f64.ln(), 20f64.ln());
    let grid = 400;
    let step = (hi - lo) / grid as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=grid {
        let x = lo + step * i as f64;
        let (amp, sse) = solve(x);
        if amp > 0.0 && sse < best.1 {
            best = (x, sse);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::FitFailure(
            "no positive-amplitude exponential fits the autocovariance".into(),
        ));
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (solve(c).1, solve(d).1);
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = solve(c).1;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = solve(d).1;
        }
    }
    let ln_g = 0.5 * (a + b);
    let (amp, sse) = solve(ln_g);
    if !(amp > 0.0) {
        return Err(Error::FitFailure(
            "fitted variance amplitude is not positive".into(),
        ));
    }
    Ok(GammaFit {
        gamma: ln_g.exp(),
        theta_hat,
        var_v_hat: amp,
        lag_range: (lags[0] as usize, lags[lags.len() - 1] as usize),
        sse,
    })
}

/// (κ_M², κ_H²) = (2γ/(q−1), β·κ_M²).
pub fn kappas_from_fit(bp: &BetaPrimeParams, gamma: f64) -> Result<(f64, f64)> {
    bp.validate()?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma must be > 0, got {gamma}")));
    }
    let km2 = 2.0 * gamma / (bp.q - 1.0);
    Ok((km2, bp.beta * km2))
}
