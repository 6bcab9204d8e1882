//! Realized variance and the time dependence of its variance,
//! var(RV_T) = var[v]·f(γT) with f(x) = 2(x − 1 + e^{−x})/x².

use crate::calibration::empirical_variance_moments;
use crate::data_io::ReturnSeries;
use crate::error::{Error, Result};
use crate::sde::SimPath;

/// Below this argument f switches to its Maclaurin series.
const SERIES_SWITCH: f64 = 1e-3;

/// f(x) = 2(x − 1 + e^{−x})/x², with f(0) = 1.
pub fn f_gamma_t(gt: f64) -> f64 {
    if gt.is_nan() {
        return f64::NAN;
    }
    if gt <= 0.0 {
        return 1.0;
    }
    if gt < SERIES_SWITCH {
        // 2 Σ_{k≥0} (−x)^k/(k+2)!
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..8 {
            sum += term / factorial(k + 2);
            term *= -gt;
        }
        return 2.0 * sum;
    }
    2.0 * (gt + (-gt).exp_m1()) / (gt * gt)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Window means of z²/dt.
#[derive(Debug, Clone, PartialEq)]
pub struct RvSeries {
    /// Window length in days.
    pub window: u32,
    pub values: Vec<f64>,
    pub overlapping: bool,
}

/// Sliding (stride 1) or disjoint window sums of `x` over `m` entries, divided by m.
fn window_means(x: &[f64], m: usize, overlapping: bool) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(x.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for v in x {
        acc += v;
        prefix.push(acc);
    }
    let stride = if overlapping { 1 } else { m };
    (0..=x.len() - m)
        .step_by(stride)
        .map(|i| (prefix[i + m] - prefix[i]) / m as f64)
        .collect()
}

fn samples_per_window(window: u32, dt: f64) -> Result<usize> {
    if window == 0 {
        return Err(Error::InvalidConfig(
            "RV window must be at least 1 day".into(),
        ));
    }
    let m = f64::from(window) / dt;
    let rounded = m.round();
    if rounded < 1.0 || (m - rounded).abs() > 1e-9 * rounded {
        return Err(Error::InvalidConfig(format!(
            "window of {window} days is not a whole number of {dt}-day samples"
        )));
    }
    Ok(rounded as usize)
}

/// Realized variance over `window`-day windows of single-step returns.
pub fn rv_series(z1: &ReturnSeries, window: u32, overlapping: bool) -> Result<RvSeries> {
    if z1.tau != 1 {
        return Err(Error::InvalidConfig(format!(
            "realized variance needs single-step returns, got tau = {}",
            z1.tau
        )));
    }
    let m = samples_per_window(window, z1.dt)?;
    if z1.n() < 2 * m {
        return Err(Error::InsufficientData {
            needed: 2 * m,
            got: z1.n(),
        });
    }
    let sq: Vec<f64> = z1.z.iter().map(|z| z * z / z1.dt).collect();
    Ok(RvSeries {
        window,
        values: window_means(&sq, m, overlapping),
        overlapping,
    })
}

/// var(RV_T)/var[v] on a grid of window lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCurve {
    pub t: Vec<f64>,
    pub ratio: Vec<f64>,
    /// The variance of v the ratios are normalized by.
    pub var_v: f64,
    /// γ used for the reference column f(γT), if known.
    pub gamma: Option<f64>,
}

impl RatioCurve {
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// f(γT) at each grid point, when γ is set.
    pub fn reference(&self) -> Option<Vec<f64>> {
        let g = self.gamma?;
        Some(self.t.iter().map(|t| f_gamma_t(g * t)).collect())
    }
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

fn check_grid(t_grid: &[u32]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidConfig("T grid is empty".into()));
    }
    Ok(())
}

/// Ratio curve from daily returns, normalized by the fourth-moment estimate
/// of var[v]. Each window average of z² also carries the conditional
/// Gaussian noise of the returns, which adds ≈ 2E[v²]/T to var(RV_T).
pub fn rv_variance_ratio_curve(z1: &ReturnSeries, t_grid: &[u32]) -> Result<RatioCurve> {
    check_grid(t_grid)?;
    let var_v = empirical_variance_moments(z1)?.var_v_hat;
    if !(var_v > 0.0) {
        return Err(Error::DegenerateData(format!(
            "estimated var[v] = {var_v:e} is not positive"
        )));
    }
    let mut ratio = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let rv = rv_series(z1, t, true)?;
        ratio.push(sample_variance(&rv.values) / var_v);
    }
    Ok(RatioCurve {
        t: t_grid.iter().map(|&t| f64::from(t)).collect(),
        ratio,
        var_v,
        gamma: None,
    })
}

/// Ratio curve of a simulated path, using its integrated variance directly
/// and the sample variance of the recorded v as normalization.
pub fn path_rv_ratio_curve(path: &SimPath, t_grid: &[u32]) -> Result<RatioCurve> {
    check_grid(t_grid)?;
    if path.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: path.len(),
        });
    }
    let var_v = sample_variance(&path.v);
    if !(var_v > 0.0) {
        return Err(Error::DegenerateData(
            "simulated variance is constant".into(),
        ));
    }
    // iv[i] covers the stride ending at record i; per-day rates.
    let rates: Vec<f64> = path.iv[1..].iter().map(|iv| iv / path.dt).collect();
    let mut ratio = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let m = samples_per_window(t, path.dt)?;
        if rates.len() < 2 * m {
            return Err(Error::InsufficientData {
                needed: 2 * m,
                got: rates.len(),
            });
        }
        ratio.push(sample_variance(&window_means(&rates, m, true)) / var_v);
    }
    Ok(RatioCurve {
        t: t_grid.iter().map(|&t| f64::from(t)).collect(),
        ratio,
        var_v,
        gamma: None,
    })
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slopes of ln ratio against ln T for T ≤ split and T > split.
pub fn loglog_slopes(curve: &RatioCurve, split_t: f64) -> Result<(f64, f64)> {
    let (mut small, mut large) = (Vec::new(), Vec::new());
    for (&t, &r) in curve.t.iter().zip(&curve.ratio) {
        if !(t > 0.0) || !(r > 0.0) {
            continue;
        }
        let p = (t.ln(), r.ln());
        if t <= split_t {
            small.push(p);
        } else {
            large.push(p);
        }
    }
    for side in [&small, &large] {
        if side.len() < 3 {
            return Err(Error::InsufficientData {
                needed: 3,
                got: side.len(),
            });
        }
    }
    Ok((ols_slope(&small), ols_slope(&large)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_limits() {
        assert_eq!(f_gamma_t(0.0), 1.0);
        assert!((f_gamma_t(1e-9) - 1.0).abs() < 1e-9);
        let x = 10.0f64;
        assert!((f_gamma_t(x) - 2.0 * (9.0 + (-x).exp()) / 100.0).abs() < 1e-15);
        assert!((f_gamma_t(200.0) * 100.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn series_branch_is_continuous() {
        let below = f_gamma_t(SERIES_SWITCH * (1.0 - 1e-12));
        let above = f_gamma_t(SERIES_SWITCH);
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn constant_squares_give_constant_rv() {
        let z = ReturnSeries::new(vec![0.1; 50], 1, 1.0, 0.0, true);
        let rv = rv_series(&z, 5, true).unwrap();
        assert_eq!(rv.values.len(), 46);
        assert!(rv.values.iter().all(|v| (v - 0.01).abs() < 1e-15));
        assert_eq!(rv_series(&z, 5, false).unwrap().values.len(), 10);
        assert!(rv_series(&z, 30, true).is_err());
    }

    #[test]
    fn slopes_need_three_points_per_side() {
        let curve = RatioCurve {
            t: vec![1.0, 2.0, 3.0, 100.0],
            ratio: vec![1.0, 0.9, 0.8, 0.1],
            var_v: 1.0,
            gamma: None,
        };
        assert!(loglog_slopes(&curve, 10.0).is_err());
    }
}
