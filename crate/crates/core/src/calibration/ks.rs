use crate::error::{Error, Result};

/// Kolmogorov–Smirnov distance D_n = max_i max(i/n − F(x_i), F(x_i) − (i−1)/n)
/// between sorted `samples` and the CDF `cdf`.
pub fn ks_statistic<F>(samples: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if samples.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(
            "ks_statistic requires samples sorted ascending",
        ));
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x)?;
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(d.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_against_uniform() {
        let d = ks_statistic(&[0.5], |x| Ok(x)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn midpoint_quantiles() {
        let n = 40;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| Ok(x)).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_and_unsorted() {
        assert!(ks_statistic(&[], |x| Ok(x)).is_err());
        assert!(ks_statistic(&[0.2, 0.1], |x| Ok(x)).is_err());
    }
}
