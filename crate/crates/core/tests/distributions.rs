mod common;

use common::{derivative, rel, Law};
use mhmvol::distributions::*;
use mhmvol::Error;
use proptest::prelude::*;

fn reference_params() -> ModelParams {
    ModelParams::from_squares(0.05, 0.01, 0.02, 2e-4).unwrap()
}

fn reference_bp() -> BetaPrimeParams {
    BetaPrimeParams::new(5.0, 6.0, 0.01).unwrap()
}

fn log_slope(f: impl Fn(f64) -> f64, v: f64) -> f64 {
    derivative(|u: f64| f(u.exp()).ln(), v.ln(), 1e-3)
}

#[test]
fn parameter_map_round_trip() {
    let bp = bp_from_model(&reference_params()).unwrap();
    assert!(rel(bp.p, 5.0) < 1e-14 && rel(bp.q, 6.0) < 1e-14 && rel(bp.beta, 0.01) < 1e-14);
    assert!(rel(bp.mean(), 0.01) < 1e-14);

    let m = model_from_bp(&reference_bp(), 0.05, 0.0, 0.0).unwrap();
    assert!(rel(m.kappa_m_sq(), 0.02) < 1e-14);
    assert!(rel(m.kappa_h_sq(), 2e-4) < 1e-14);
    assert!(rel(m.theta, 0.01) < 1e-14);

    let back = bp_from_model(
        &model_from_bp(
            &BetaPrimeParams::new(2.7, 3.9, 4e-5).unwrap(),
            0.041,
            -0.3,
            1e-4,
        )
        .unwrap(),
    )
    .unwrap();
    assert!(rel(back.p, 2.7) < 1e-13 && rel(back.q, 3.9) < 1e-13 && rel(back.beta, 4e-5) < 1e-13);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(
        BetaPrimeParams::new(5.0, 1.0, 0.01),
        Err(Error::Domain(_))
    ));
    assert!(BetaPrimeParams::new(0.0, 3.0, 0.01).is_err());
    assert!(BetaPrimeParams::new(1.0, 3.0, -1.0).is_err());
    assert!(matches!(
        ModelParams::from_squares(0.05, 0.01, 0.0, 0.0),
        Err(Error::DegenerateModel(_))
    ));
    assert!(ModelParams::from_squares(0.0, 0.01, 0.02, 2e-4).is_err());
    assert!(ModelParams::from_squares(0.05, -0.01, 0.02, 2e-4).is_err());
    let mut p = reference_params();
    p.rho = 1.5;
    assert!(p.validate().is_err());
    // HM needs α > 1.
    assert!(GammaParams::new(0.8, 0.01).is_err());
    assert!(ModelParams::from_squares(0.05, 0.01, 0.0, 2e-3)
        .unwrap()
        .steady_state(ModelKind::Hm)
        .is_err());
}

#[test]
fn fourth_moment_condition() {
    assert!(reference_params().has_finite_fourth_moment());
    assert!(!ModelParams::from_squares(0.05, 0.01, 0.12, 2e-4)
        .unwrap()
        .has_finite_fourth_moment());
}

#[test]
fn single_noise_laws_have_the_documented_shapes() {
    let p = reference_params();
    match p.steady_state(ModelKind::Hm).unwrap() {
        VarianceLaw::Gamma(g) => assert!(rel(g.alpha, 2.0 * 0.05 * 0.01 / 2e-4) < 1e-14),
        other => panic!("{other:?}"),
    }
    match p.steady_state(ModelKind::Mm).unwrap() {
        VarianceLaw::InverseGamma(g) => {
            assert!(rel(g.alpha, 2.0 * 0.05 * 0.01 / 0.02) < 1e-14);
            // Tail shape α/θ + 1 = 1 + 2γ/κ_M² = q.
            assert!(rel(g.shape(), 6.0) < 1e-14);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn bp_pdf_closed_values() {
    let beta = 0.37;
    let flat = BetaPrimeParams {
        p: 1.0,
        q: 1.0,
        beta,
    };
    assert!(rel(bp_pdf(beta, &flat).unwrap(), 1.0 / (4.0 * beta)) < 1e-14);
    assert!(rel(bp_cdf(beta, &flat).unwrap(), 0.5) < 1e-14);
    assert_eq!(bp_pdf(0.0, &reference_bp()).unwrap(), 0.0);
    assert_eq!(bp_cdf(f64::INFINITY, &reference_bp()).unwrap(), 1.0);
    assert!((bp_cdf(1e6, &reference_bp()).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(
        bp_pdf(0.0, &BetaPrimeParams::new(0.5, 3.0, 1.0).unwrap()).unwrap(),
        f64::MAX
    );
    assert!(bp_pdf(-1.0, &reference_bp()).is_err());
}

#[test]
fn bp_cdf_matches_integrated_pdf() {
    // 30-digit reference: I_{2/3}(5, 6).
    assert!(
        rel(
            bp_cdf(0.02, &reference_bp()).unwrap(),
            0.923_436_468_018_086_713
        ) < 1e-13
    );
    // Same value by integrating the oracle density over (0, 0.02] with v = 0.02/(1+t).
    let law = Law::BetaPrime {
        p: 5.0,
        q: 6.0,
        beta: 0.01,
    };
    let g = |t: f64, _: f64| {
        let v = 0.02 / (1.0 + t);
        law.ln_pdf(v, v.ln()) + (0.02 / (1.0 + t).powi(2)).ln()
    };
    let want = common::ln_integral_half_line(g, 1.0, 1e-13).exp();
    assert!(rel(bp_cdf(0.02, &reference_bp()).unwrap(), want) < 1e-10);
}

#[test]
fn bp_moments() {
    let bp = reference_bp();
    assert!(rel(bp_moment(1, &bp).unwrap(), 0.01) < 1e-14);
    assert!(rel(bp_moment(2, &bp).unwrap(), 1.5e-4) < 1e-14);
    assert!(matches!(
        bp_moment(6, &bp),
        Err(Error::MomentDoesNotExist { .. })
    ));
    let law = Law::BetaPrime {
        p: 5.0,
        q: 6.0,
        beta: 0.01,
    };
    for n in 1..6 {
        let want = law.moment(f64::from(n), 1e-13);
        assert!(rel(bp_moment(n, &bp).unwrap(), want) < 1e-8, "n={n}");
    }
}

#[test]
fn second_moment_matches_coefficient_form() {
    for &(g, th, km2, kh2) in &[
        (0.05, 0.01, 0.02, 2e-4),
        (0.042, 1.1e-4, 0.013, 3e-6),
        (1.0, 2.0, 0.5, 0.3),
    ] {
        let params = ModelParams::from_squares(g, th, km2, kh2).unwrap();
        let bp = bp_from_model(&params).unwrap();
        let want = (2.0 * g * th * th + kh2 * th) / (2.0 * g - km2);
        assert!(rel(bp_moment(2, &bp).unwrap(), want) < 1e-12);
    }
}

#[test]
fn bp_power_law_regimes() {
    let bp = reference_bp();
    let f = |v: f64| bp_pdf(v, &bp).unwrap();
    let exact = |x: f64| bp.p - 1.0 - (bp.p + bp.q) * x / (1.0 + x);
    for k in 0..=8 {
        let x = 10f64.powf(2.0 + 0.25 * k as f64);
        let s = log_slope(f, x * bp.beta);
        assert!((s - exact(x)).abs() < 1e-8);
        assert!(rel(s, -bp.q - 1.0) < 0.02, "tail slope {s} at v = {x}β");
    }
    for k in 0..=8 {
        let x = 10f64.powf(-4.0 + 0.25 * k as f64);
        assert!((log_slope(f, x * bp.beta) - exact(x)).abs() < 1e-8);
    }
    // The small-v slope sits within 2% of p − 1 on [1e-4β, 1e-2β] once
    // (p+q)/101 < 0.02(p−1); at p = 5, q = 6 it drifts to 2.7% at the upper end.
    let wide = BetaPrimeParams::new(20.0, 3.0, 0.01).unwrap();
    for k in 0..=8 {
        let v = 10f64.powf(-4.0 + 0.25 * k as f64) * wide.beta;
        let s = log_slope(|v| bp_pdf(v, &wide).unwrap(), v);
        assert!(rel(s, wide.p - 1.0) < 0.02, "small-v slope {s}");
    }
}

#[test]
fn bp_mode() {
    let bp = reference_bp();
    // Golden-section maximization of the density.
    let (mut a, mut b) = (1e-4, 0.05);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if bp_pdf(c, &bp).unwrap() > bp_pdf(d, &bp).unwrap() {
            b = d;
        } else {
            a = c;
        }
    }
    assert!(rel(0.5 * (a + b), bp.beta * (bp.p - 1.0) / (bp.q + 1.0)) < 1e-6);
}

#[test]
fn cdf_derivative_is_pdf() {
    let bp = reference_bp();
    let ga = GammaParams::new(2.5, 0.01).unwrap();
    let iga = InverseGammaParams::new(0.05, 0.01).unwrap();
    for i in 0..100 {
        let v = 0.0005 * (1.0 + i as f64) * (1.0 + 0.01 * (i % 3) as f64);
        let h = 1e-5 * v;
        let d = derivative(|x| bp_cdf(x, &bp).unwrap(), v, h);
        assert!(rel(d, bp_pdf(v, &bp).unwrap()) < 1e-6, "BP at {v}");
        let d = derivative(|x| ga_cdf(x, &ga).unwrap(), v, h);
        assert!(rel(d, ga_pdf(v, &ga).unwrap()) < 1e-6, "Ga at {v}");
        let d = derivative(|x| iga_cdf(x, &iga).unwrap(), v, h);
        assert!(rel(d, iga_pdf(v, &iga).unwrap()) < 1e-6, "IGa at {v}");
    }
}

#[test]
fn single_noise_laws_match_oracle() {
    let ga = GammaParams::new(2.5, 0.01).unwrap();
    let iga = InverseGammaParams::new(0.05, 0.01).unwrap();
    let ga_o = Law::Gamma {
        alpha: 2.5,
        theta: 0.01,
    };
    let iga_o = Law::InverseGamma {
        alpha: 0.05,
        theta: 0.01,
    };
    for v in [1e-4, 3e-3, 0.01, 0.04, 0.2] {
        assert!(rel(ga_pdf(v, &ga).unwrap(), ga_o.ln_pdf(v, v.ln()).exp()) < 1e-12);
        assert!(rel(iga_pdf(v, &iga).unwrap(), iga_o.ln_pdf(v, v.ln()).exp()) < 1e-12);
    }
    let g = VarianceLaw::Gamma(ga);
    let i = VarianceLaw::InverseGamma(iga);
    for n in 1..=3 {
        assert!(rel(g.moment(n).unwrap(), ga_o.moment(f64::from(n), 1e-13)) < 1e-9);
        assert!(rel(i.moment(n).unwrap(), iga_o.moment(f64::from(n), 1e-13)) < 1e-9);
    }
    assert!(rel(g.mean(), 0.01) < 1e-15 && rel(i.mean(), 0.01) < 1e-15);
}

#[test]
fn volatility_density() {
    let beta: f64 = 0.04;
    let flat = BetaPrimeParams {
        p: 1.0,
        q: 1.0,
        beta,
    };
    let s = beta.sqrt();
    assert!(
        rel(
            volatility_pdf(s, |v| bp_pdf(v, &flat).unwrap()),
            1.0 / (2.0 * s)
        ) < 1e-14
    );
    // Normalized over σ as well.
    let bp = reference_bp();
    let g = |sig: f64, _: f64| volatility_pdf(sig, |v| bp_pdf(v, &bp).unwrap()).ln();
    assert!(rel(common::ln_integral_half_line(g, 0.1, 1e-12).exp(), 1.0) < 1e-9);
}

#[test]
fn beta_prime_approaches_inverse_gamma() {
    // q fixed, p grows with pβ held: BP → IGa with shape q and scale pβ.
    let (q, c) = (6.0, 0.05);
    let mut previous = f64::INFINITY;
    for p in [5.0, 20.0, 80.0] {
        let bp = BetaPrimeParams::new(p, q, c / p).unwrap();
        let iga = InverseGammaParams::new(c, c / (q - 1.0)).unwrap();
        let sup = (0..=400)
            .map(|i| {
                let v = bp.beta / 10.0 * 1000f64.powf(i as f64 / 400.0);
                (bp_pdf(v, &bp).unwrap() - iga_pdf(v, &iga).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(sup < previous, "p={p}: {sup} vs {previous}");
        previous = sup;
    }
}

#[test]
fn mhm_law_nests_single_noise_laws() {
    let v_grid = [3e-3, 6e-3, 0.01, 0.015, 0.03];
    let hm = ModelParams::from_squares(0.05, 0.01, 0.0, 2e-4)
        .unwrap()
        .steady_state(ModelKind::Hm)
        .unwrap();
    let near_hm = ModelParams::from_squares(0.05, 0.01, 1e-8, 2e-4)
        .unwrap()
        .steady_state(ModelKind::Mhm)
        .unwrap();
    let mm = ModelParams::from_squares(0.05, 0.01, 0.02, 0.0)
        .unwrap()
        .steady_state(ModelKind::Mm)
        .unwrap();
    let near_mm = ModelParams::from_squares(0.05, 0.01, 0.02, 1e-9)
        .unwrap()
        .steady_state(ModelKind::Mhm)
        .unwrap();
    for v in v_grid {
        assert!(rel(near_hm.pdf(v).unwrap(), hm.pdf(v).unwrap()) < 1e-4);
        assert!(rel(near_mm.pdf(v).unwrap(), mm.pdf(v).unwrap()) < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bp_cdf_is_monotone(p in 0.2f64..30.0, q in 1.05f64..30.0, beta in 1e-5f64..1.0, a in 0.0f64..50.0, b in 0.0f64..50.0) {
        let bp = BetaPrimeParams::new(p, q, beta).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let flo = bp_cdf(lo * beta, &bp).unwrap();
        let fhi = bp_cdf(hi * beta, &bp).unwrap();
        prop_assert!((0.0..=1.0).contains(&flo) && (0.0..=1.0).contains(&fhi));
        prop_assert!(flo <= fhi + 1e-15);
    }

    #[test]
    fn mean_equals_theta_under_the_map(g in 0.001f64..1.0, th in 1e-5f64..1.0, km2 in 1e-4f64..1.0, kh2 in 1e-8f64..1e-2) {
        let params = ModelParams::from_squares(g, th, km2, kh2).unwrap();
        let bp = bp_from_model(&params).unwrap();
        prop_assert!(rel(bp_moment(1, &bp).unwrap(), th) < 1e-12);
    }
}
