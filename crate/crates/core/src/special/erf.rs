//! Error function and its complement, routed through P(½, x²) / Q(½, x²).

use super::gamma::incomplete_gamma_pair;

/// erf(x). Odd, with |error| well below 1e-12 on the whole line.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    let (p, _) = incomplete_gamma_pair(0.5, x * x).expect("s = 1/2 and x² ≥ 0 are in domain");
    p.copysign(x)
}

/// erfc(x) = 1 − erf(x), accurate in the upper tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0 - erf(x);
    }
    incomplete_gamma_pair(0.5, x * x)
        .expect("s = 1/2 and x² ≥ 0 are in domain")
        .1
}

/// Standard normal CDF Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}
