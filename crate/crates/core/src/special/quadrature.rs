//! Globally adaptive Gauss–Kronrod (10/21) quadrature, and a wrapper for
//! integrating `exp(h(s))` over the whole line when `h` is unimodal.

use crate::error::{Error, Result};

/// Tolerances and budget shared by every adaptive integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "quadrature tolerances must be positive (abs_tol={}, rel_tol={})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Same budget with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

// Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980803000,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over `[points[0], points[last]]`, using the interior points
/// as initial breakpoints. Points must be finite and strictly increasing.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    if points.len() < 2 {
        return Err(Error::domain("integration needs at least two points"));
    }
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(
            "integration breakpoints must be finite and strictly increasing",
        ));
    }
    let mut segments: Vec<Segment> = points
        .windows(2)
        .map(|w| gk21(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * segments.len();
    let budget = cfg.max_subdivisions.max(segments.len());
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Convergence(format!(
                "integrand produced a non-finite value (sum {value}, error {error})"
            )));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= target {
            return Ok(Estimate {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if segments.len() >= budget {
            return Err(Error::Convergence(format!(
                "{} subdivisions exhausted: estimate {value:e}, error {error:e}, target {target:e}",
                segments.len()
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::Convergence(format!(
                "interval [{}, {}] cannot be bisected further",
                seg.a, seg.b
            )));
        }
        segments.push(gk21(&mut f, seg.a, mid));
        segments.push(gk21(&mut f, mid, seg.b));
        evaluations += 42;
    }
}

/// Result of [`integrate_exp`].
#[derive(Debug, Clone, Copy)]
pub struct LogEstimate {
    /// ln ∫ exp(h).
    pub ln_value: f64,
    /// Relative error estimate of the integral itself.
    pub rel_error: f64,
    /// Location of the maximum of `h`.
    pub peak: f64,
}

/// Drop below the peak at which the integration range is cut (e^-50 ≈ 2e-22).
const LOG_CUTOFF: f64 = 50.0;
const MAX_EXPANSIONS: usize = 2000;

/// ∫_{-∞}^{∞} exp(h(s)) ds for a unimodal log-integrand `h`, computed in
/// scaled form so that neither the integrand nor the result over/underflows.
///
/// `start` is a guess for the mode; `scale` the expected width of the peak.
/// Non-finite values of `h` are treated as −∞.
pub fn integrate_exp<H: FnMut(f64) -> f64>(
    mut h: H,
    start: f64,
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<LogEstimate> {
    let mut eval = |s: f64| {
        let v = h(s);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let scale = if scale.is_finite() && scale > 0.0 {
        scale
    } else {
        1.0
    };
    let (peak, hmax) = locate_mode(&mut eval, start, scale)?;
    if !hmax.is_finite() {
        return Err(Error::Convergence(format!(
            "log-integrand has no finite maximum (found {hmax} at {peak})"
        )));
    }
    let left_w = drop_distance(&mut eval, peak, hmax, -1.0, 1.0, scale)?;
    let right_w = drop_distance(&mut eval, peak, hmax, 1.0, 1.0, scale)?;
    let lo = peak - drop_distance(&mut eval, peak, hmax, -1.0, LOG_CUTOFF, left_w)?;
    let hi = peak + drop_distance(&mut eval, peak, hmax, 1.0, LOG_CUTOFF, right_w)?;

    let mut pts = vec![lo];
    for k in [8.0, 3.0, 1.0] {
        pts.push(peak - k * left_w);
    }
    pts.push(peak);
    for k in [1.0, 3.0, 8.0] {
        pts.push(peak + k * right_w);
    }
    pts.push(hi);
    pts.retain(|&p| p >= lo && p <= hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

    let est = integrate(|s| (eval(s) - hmax).exp(), &pts, cfg)?;
    if !(est.value > 0.0) {
        return Err(Error::Convergence(format!(
            "scaled integral is not positive ({})",
            est.value
        )));
    }
    Ok(LogEstimate {
        ln_value: hmax + est.value.ln(),
        rel_error: est.abs_error / est.value,
        peak,
    })
}

/// Expand from `start` until the function turns down on both sides, then
/// golden-section search the bracket.
fn locate_mode<H: FnMut(f64) -> f64>(h: &mut H, start: f64, scale: f64) -> Result<(f64, f64)> {
    let mut b = start;
    let mut hb = h(b);
    if hb == f64::NEG_INFINITY {
        // Possibly outside the support; probe outward.
        let probe = (1..200).find_map(|k| {
            let d = scale * 1.5f64.powi(k);
            [start + d, start - d]
                .into_iter()
                .map(|c| (c, h(c)))
                .find(|&(_, v)| v > f64::NEG_INFINITY)
        });
        match probe {
            Some((c, v)) => {
                b = c;
                hb = v;
            }
            None => {
                return Err(Error::Convergence(
                    "log-integrand is -inf everywhere probed".into(),
                ))
            }
        }
    }
    let (hp, hm) = (h(b + scale), h(b - scale));
    if hp <= hb && hm <= hb {
        return golden(h, b - scale, b + scale);
    }
    let dir = if hp > hm { 1.0 } else { -1.0 };
    walk(h, b, hb, dir, scale)
}

/// Climb in direction `dir` with doubling steps until the function drops,
/// then refine inside the last three points.
fn walk<H: FnMut(f64) -> f64>(
    h: &mut H,
    start: f64,
    hstart: f64,
    dir: f64,
    step0: f64,
) -> Result<(f64, f64)> {
    let mut a = start;
    let mut b = start;
    let mut hb = hstart;
    let mut step = step0;
    let mut c = b + dir * step;
    let mut hc = h(c);
    let mut n = 0;
    while hc >= hb {
        a = b;
        b = c;
        hb = hc;
        step *= 2.0;
        c = b + dir * step;
        hc = h(c);
        n += 1;
        if n > MAX_EXPANSIONS || !c.is_finite() {
            return Err(Error::Convergence(
                "log-integrand increases without bound (integral diverges)".into(),
            ));
        }
    }
    golden(h, a.min(c), a.max(c))
}

fn golden<H: FnMut(f64) -> f64>(h: &mut H, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    let tol = 1e-9 * (b - a).abs().max(1e-300);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = h(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = h(x1);
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Distance from `peak` in direction `dir` at which `h` first falls `drop`
/// below `hmax`, located by doubling then bisection.
fn drop_distance<H: FnMut(f64) -> f64>(
    h: &mut H,
    peak: f64,
    hmax: f64,
    dir: f64,
    drop: f64,
    step0: f64,
) -> Result<f64> {
    let target = hmax - drop;
    let mut inner = 0.0;
    let mut outer = step0.max(1e-12);
    let mut n = 0;
    while h(peak + dir * outer) > target {
        inner = outer;
        outer *= 2.0;
        n += 1;
        if n > MAX_EXPANSIONS || !outer.is_finite() {
            return Err(Error::Convergence(
                "log-integrand does not decay (integral diverges)".into(),
            ));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (inner + outer);
        if h(peak + dir * mid) > target {
            inner = mid;
        } else {
            outer = mid;
        }
        if outer - inner <= 1e-3 * outer {
            break;
        }
    }
    Ok(outer)
}
