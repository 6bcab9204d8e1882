//! Reference implementations used as test oracles. They deliberately share no
//! code with the library: lnΓ from the Stirling series with upward shifting,
//! integrals on (0, ∞) from an exp-sinh trapezoid rule with step halving.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut x = x;
    let mut shift = 0.0;
    while x < 20.0 {
        shift += x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series - shift
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// ln ∫₀^∞ exp(g(t)) dt, where `g` receives (t, ln t). The substitution
/// t = c·exp(½π sinh s) makes both ends decay double-exponentially; the
/// trapezoid step is halved until the relative change drops below `rel_tol`.
pub fn ln_integral_half_line<G: Fn(f64, f64) -> f64>(g: G, center: f64, rel_tol: f64) -> f64 {
    const HALF_WIDTH: f64 = 6.0;
    let ln_c = center.ln();
    let node = |s: f64| -> f64 {
        let ln_t = ln_c + FRAC_PI_2 * s.sinh();
        let t = ln_t.exp();
        // ln of the integrand times dt/ds
        g(t, ln_t) + ln_t + (FRAC_PI_2 * s.cosh()).ln()
    };
    let mut h = 0.25;
    let mut values: Vec<(f64, f64)> = Vec::new();
    let mut s = -HALF_WIDTH;
    while s <= HALF_WIDTH + 1e-12 {
        values.push((s, node(s)));
        s += h;
    }
    let total = |vals: &[(f64, f64)], h: f64| -> f64 {
        let m = vals
            .iter()
            .map(|v| v.1)
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = vals.iter().map(|v| (v.1 - m).exp()).sum();
        m + (sum * h).ln()
    };
    let mut prev = total(&values, h);
    for _ in 0..12 {
        // Add the midpoints of the current grid.
        let mids: Vec<(f64, f64)> = values
            .windows(2)
            .map(|w| {
                let s = 0.5 * (w[0].0 + w[1].0);
                (s, node(s))
            })
            .collect();
        values.extend(mids);
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        h *= 0.5;
        let next = total(&values, h);
        if (next - prev).abs() < rel_tol {
            return next;
        }
        prev = next;
    }
    panic!("oracle quadrature did not converge");
}

/// U(a, b, z) for a > 0, z > 0 from its Laplace-type integral.
pub fn kummer_u(a: f64, b: f64, z: f64, rel_tol: f64) -> f64 {
    let g = |t: f64, ln_t: f64| -z * t + (a - 1.0) * ln_t + (b - a - 1.0) * t.ln_1p();
    let center = (a / z).clamp(1e-3, 1e3);
    (ln_integral_half_line(g, center, rel_tol) - ln_gamma(a)).exp()
}

/// Stationary variance densities written out independently of the library.
#[derive(Debug, Clone, Copy)]
pub enum Law {
    BetaPrime {
        p: f64,
        q: f64,
        beta: f64,
    },
    /// Shape α and mean θ.
    Gamma {
        alpha: f64,
        theta: f64,
    },
    /// Shape α/θ + 1 and scale α.
    InverseGamma {
        alpha: f64,
        theta: f64,
    },
}

impl Law {
    pub fn ln_pdf(&self, v: f64, ln_v: f64) -> f64 {
        match *self {
            Law::BetaPrime { p, q, beta } => {
                (p - 1.0) * ln_v - (p + q) * (v / beta).ln_1p() - p * beta.ln() - ln_beta(p, q)
            }
            Law::Gamma { alpha, theta } => {
                let scale = theta / alpha;
                (alpha - 1.0) * ln_v - v / scale - alpha * scale.ln() - ln_gamma(alpha)
            }
            Law::InverseGamma { alpha, theta } => {
                let shape = alpha / theta + 1.0;
                shape * alpha.ln() - ln_gamma(shape) - (shape + 1.0) * ln_v - alpha / v
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Law::BetaPrime { p, q, beta } => p * beta / (q - 1.0),
            Law::Gamma { theta, .. } | Law::InverseGamma { theta, .. } => theta,
        }
    }

    /// ∫ f(v) N(z; 0, vτ) dv.
    pub fn return_pdf(&self, z: f64, tau: f64, rel_tol: f64) -> f64 {
        let g = |v: f64, ln_v: f64| {
            self.ln_pdf(v, ln_v)
                - z * z / (2.0 * v * tau)
                - 0.5 * (2.0 * PI * tau).ln()
                - 0.5 * ln_v
        };
        ln_integral_half_line(g, self.mean(), rel_tol).exp()
    }

    /// ∫₀^∞ vⁿ f(v) dv.
    pub fn moment(&self, n: f64, rel_tol: f64) -> f64 {
        let g = |v: f64, ln_v: f64| self.ln_pdf(v, ln_v) + n * ln_v;
        ln_integral_half_line(g, self.mean(), rel_tol).exp()
    }
}

/// ∫_{−∞}^{∞} |z|^k ψ(z) dz for an even density ψ.
pub fn even_integral<F: Fn(f64) -> f64>(psi: F, k: f64, scale: f64, rel_tol: f64) -> f64 {
    let g = |z: f64, ln_z: f64| k * ln_z + psi(z).ln();
    2.0 * ln_integral_half_line(g, scale, rel_tol).exp()
}

/// Five-point central difference.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Relative difference |a − b|/|b|.
pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
