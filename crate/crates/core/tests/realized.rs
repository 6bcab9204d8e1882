mod common;

use common::rel;
use mhmvol::calibration::empirical_variance_moments;
use mhmvol::data_io::ReturnSeries;
use mhmvol::distributions::{ModelKind, ModelParams};
use mhmvol::realized::*;
use mhmvol::sde::{returns_at_lag, simulate, SimConfig, SimPath};
use mhmvol::Error;
use proptest::prelude::*;

const GAMMA: f64 = 0.05;

fn daily_path(days: usize, seed: u64) -> SimPath {
    let p = ModelParams::from_squares(GAMMA, 0.01, 0.02, 2e-4).unwrap();
    let cfg = SimConfig::new(0.1, 10 * days + 10_000, seed)
        .burn_in(10_000)
        .record_every(10);
    simulate(ModelKind::Mhm, &p, &cfg).unwrap()
}

fn exact_curve(t: &[f64]) -> RatioCurve {
    RatioCurve {
        t: t.to_vec(),
        ratio: t.iter().map(|t| f_gamma_t(GAMMA * t)).collect(),
        var_v: 1.0,
        gamma: Some(GAMMA),
    }
}

#[test]
fn f_values_and_limits() {
    assert_eq!(f_gamma_t(0.0), 1.0);
    assert!((f_gamma_t(1e-12) - 1.0).abs() < 1e-12);
    assert!((f_gamma_t(10.0) - 0.180_001).abs() < 1e-6);
    assert!(rel(f_gamma_t(200.0), 2.0 / 200.0) < 0.01);
    assert!(rel(1e3 * f_gamma_t(1e3), 2.0) < 0.005);
    // 1 − x/3 + x²/12 − x³/60 at the series switch.
    let x = 1e-3;
    let series = 1.0 - x / 3.0 + x * x / 12.0 - x * x * x / 60.0;
    assert!((f_gamma_t(x) - series).abs() < 1e-12);
    assert!(f_gamma_t(f64::NAN).is_nan());
}

#[test]
fn rv_of_constant_squares() {
    let z = ReturnSeries::new(vec![0.02; 40], 1, 1.0, 0.0, true);
    let rv = rv_series(&z, 4, true).unwrap();
    assert_eq!(rv.window, 4);
    assert!(rv.values.iter().all(|v| rel(*v, 4e-4) < 1e-12));
    let half = ReturnSeries {
        dt: 0.5,
        ..z.clone()
    };
    let rv = rv_series(&half, 2, false).unwrap();
    assert_eq!(rv.values.len(), 10);
    assert!(rv.values.iter().all(|v| rel(*v, 8e-4) < 1e-12));
}

#[test]
fn rv_with_unit_window_is_daily_squares() {
    let z: Vec<f64> = (0..30).map(|i| 0.001 * (i as f64 - 15.0)).collect();
    let series = ReturnSeries::new(z.clone(), 1, 1.0, 0.0, true);
    let rv = rv_series(&series, 1, true).unwrap();
    let want: Vec<f64> = z.iter().map(|x| x * x).collect();
    for (a, b) in rv.values.iter().zip(&want) {
        assert!((a - b).abs() < 1e-18);
    }
}

#[test]
fn rv_errors() {
    let z = ReturnSeries::new(vec![0.01; 10], 1, 1.0, 0.0, true);
    assert!(matches!(
        rv_series(&z, 6, true),
        Err(Error::InsufficientData { .. })
    ));
    assert!(matches!(
        rv_series(&z, 0, true),
        Err(Error::InvalidConfig(_))
    ));
    let weekly = ReturnSeries {
        tau: 5,
        ..z.clone()
    };
    assert!(rv_series(&weekly, 1, true).is_err());
    let odd = ReturnSeries { dt: 0.3, ..z };
    assert!(rv_series(&odd, 1, true).is_err());
}

#[test]
fn slopes_of_the_exact_law() {
    let small: Vec<f64> = (1..=8).map(|k| 0.1 * k as f64).collect();
    let large: Vec<f64> = (0..12)
        .map(|k| 400.0 * 25f64.powf(k as f64 / 11.0))
        .collect();
    let t: Vec<f64> = small.iter().chain(&large).copied().collect();
    let (lo, hi) = loglog_slopes(&exact_curve(&t), 1.0 / GAMMA).unwrap();
    assert!(lo > -0.05 && lo < 0.0, "small slope {lo}");
    assert!((hi + 1.0).abs() < 0.02, "large slope {hi}");
}

#[test]
fn single_point_grid_has_no_slope() {
    let curve = exact_curve(&[10.0]);
    assert_eq!(curve.len(), 1);
    assert!(matches!(
        loglog_slopes(&curve, 20.0),
        Err(Error::InsufficientData { .. })
    ));
    assert!(
        rv_variance_ratio_curve(&ReturnSeries::new(vec![0.01; 500], 1, 1.0, 0.0, true), &[])
            .is_err()
    );
}

#[test]
fn reference_column() {
    let curve = exact_curve(&[1.0, 10.0]);
    assert_eq!(curve.reference().unwrap(), curve.ratio);
    let bare = RatioCurve {
        gamma: None,
        ..curve
    };
    assert!(bare.reference().is_none());
    assert_eq!(bare.with_gamma(0.1).gamma, Some(0.1));
}

#[test]
fn simulated_path_curve_tracks_f() {
    let path = daily_path(1_000_000, 71);
    let grid: Vec<u32> = (1..=60).collect();
    let curve = path_rv_ratio_curve(&path, &grid).unwrap().with_gamma(GAMMA);
    for (t, (r, f)) in curve
        .t
        .iter()
        .zip(curve.ratio.iter().zip(curve.reference().unwrap()))
    {
        assert!(rel(*r, f) < 0.20, "T={t}: {r} vs {f}");
    }
}

#[test]
fn return_based_curve_carries_the_noise_term() {
    // Window means of z² add the Gaussian noise 2E[v²]/T on top of var[v]·f(γT).
    let path = daily_path(1_000_000, 72);
    let z = returns_at_lag(&path, 1, true).unwrap();
    let m = empirical_variance_moments(&z).unwrap();
    let grid = [5, 10, 20, 40, 60];
    let curve = rv_variance_ratio_curve(&z, &grid).unwrap();
    assert_eq!(curve.var_v, m.var_v_hat);
    for (t, r) in curve.t.iter().zip(&curve.ratio) {
        let want = f_gamma_t(GAMMA * t) + 2.0 * m.ev2_hat / (t * m.var_v_hat);
        assert!(rel(*r, want) < 0.20, "T={t}: {r} vs {want}");
    }
}

#[test]
fn overlapping_and_disjoint_windows_agree_on_average() {
    let path = daily_path(200_000, 73);
    let z = returns_at_lag(&path, 1, true).unwrap();
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let over = rv_series(&z, 20, true).unwrap();
    let disjoint = rv_series(&z, 20, false).unwrap();
    assert_eq!(disjoint.values.len(), 10_000);
    let sd = {
        let m = mean(&disjoint.values);
        (disjoint.values.iter().map(|v| (v - m).powi(2)).sum::<f64>()
            / disjoint.values.len() as f64)
            .sqrt()
    };
    let gap = (mean(&over.values) - mean(&disjoint.values)).abs();
    assert!(
        gap < 3.0 * sd / (disjoint.values.len() as f64).sqrt(),
        "gap {gap}, sd {sd}"
    );
}

proptest! {
    #[test]
    fn f_is_strictly_decreasing(x in 1e-6f64..1e4, step in 1e-3f64..1.0) {
        let y = x * (1.0 + step);
        prop_assert!(f_gamma_t(y) < f_gamma_t(x));
        prop_assert!(f_gamma_t(x) > 0.0 && f_gamma_t(x) <= 1.0);
    }
}
