use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use mhmvol::calibration::FitResult;
use mhmvol::data_io::*;
use mhmvol::distributions::{BetaPrimeParams, ModelKind, VarianceLaw};
use mhmvol::returns_density::{density_table, ReturnDensitySpec};
use mhmvol::Error;
use proptest::prelude::*;

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn series(close: &[f64]) -> PriceSeries {
    let start = NaiveDate::from_ymd_opt(2001, 3, 1).unwrap();
    let dates = (0..close.len())
        .map(|i| start + chrono::Days::new(i as u64))
        .collect();
    PriceSeries::new(dates, close.to_vec()).unwrap()
}

fn parse_row(err: Error) -> usize {
    match err {
        Error::Parse { row, .. } => row,
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn loads_a_two_row_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "p.csv",
        "Date,Open,Close\n2020-01-02,1,100.5\n2020-01-03,1,101.25\n",
    );
    let s = load_prices(&path, InputFormat::Csv).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.close, vec![100.5, 101.25]);
    assert_eq!(s.dates[1], NaiveDate::from_ymd_opt(2020, 1, 3).unwrap());
}

#[test]
fn rejects_bad_rows_by_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "order.csv",
            "date,close\n2020-01-02,1\n2020-01-06,2\n2020-01-03,3\n",
            4,
        ),
        ("zero.csv", "date,close\n2020-01-02,1\n2020-01-03,0\n", 3),
        ("missing.csv", "date,close\n2020-01-02,\n", 2),
        ("text.csv", "date,close\n2020-01-02,abc\n", 2),
        ("date.csv", "date,close\n02/01/2020,5\n", 2),
        ("nocol.csv", "date,price\n2020-01-02,5\n", 1),
    ];
    for (name, body, line) in cases {
        let err = load_prices(write(dir.path(), name, body), InputFormat::Csv).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(&format!("row {line}")), "{name}: {msg}");
        assert_eq!(parse_row(err), line);
    }
    assert!(matches!(
        load_prices(dir.path().join("absent.csv"), InputFormat::Csv),
        Err(Error::Io { .. })
    ));
}

#[test]
fn make_returns_examples() {
    let r = make_returns(&series(&[100.0, 100.0 * 0.01f64.exp()]), 1, true, false).unwrap();
    assert!((r.z[0] - 0.01).abs() < 1e-15);
    assert_eq!(r.mu_hat, 0.0);

    let grow: Vec<f64> = (0..300).map(|t| 50.0 * (4e-4 * t as f64).exp()).collect();
    let r = make_returns(&series(&grow), 3, true, true).unwrap();
    assert!(r.z.iter().all(|z| z.abs() < 1e-15));

    let ten: Vec<f64> = (0..10).map(|t| 10.0 + (t as f64).sin()).collect();
    let r = make_returns(&series(&ten), 5, true, false).unwrap();
    assert_eq!((r.n(), r.tau, r.horizon()), (5, 5, 5.0));
    assert!(matches!(
        make_returns(&series(&ten), 10, true, false),
        Err(Error::InsufficientData { .. })
    ));
    assert!(make_returns(&series(&ten), 0, true, false).is_err());
}

#[test]
fn disjoint_returns_are_a_subsample() {
    let close: Vec<f64> = (0..101)
        .map(|t| 100.0 + (0.37 * t as f64).sin() + 0.1 * t as f64)
        .collect();
    let s = series(&close);
    let over = make_returns(&s, 4, true, true).unwrap();
    let disjoint = make_returns(&s, 4, false, true).unwrap();
    assert_eq!(disjoint.n(), 25);
    for (i, z) in disjoint.z.iter().enumerate() {
        assert_eq!(*z, over.z[4 * i]);
    }
}

#[test]
fn fit_result_json_keys() {
    let fit = FitResult {
        model: ModelKind::Mhm,
        law: VarianceLaw::BetaPrime(BetaPrimeParams::new(5.0, 6.0, 0.01).unwrap()),
        ks: 0.004,
        n: 1000,
        tau: 1.0,
        converged: true,
        objective_evals: 321,
        gamma: Some(0.05),
    };
    let bytes = render(&fit, OutputFormat::Json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "model",
            "p",
            "q",
            "beta",
            "alpha",
            "theta",
            "gamma",
            "kappa_M_sq",
            "kappa_H_sq",
            "ks",
            "n",
            "tau",
            "converged"
        ]
    );
    assert_eq!(v["model"], "mhm");
    assert!(v["alpha"].is_null());
    let km2: f64 = v["kappa_M_sq"].to_string().parse().unwrap();
    assert!((km2 - 0.02).abs() < 1e-15);

    let csv = String::from_utf8(render(&fit, OutputFormat::Csv).unwrap()).unwrap();
    assert!(csv.starts_with(
        "model,p,q,beta,alpha,theta,gamma,kappa_M_sq,kappa_H_sq,ks,n,tau,converged\n"
    ));
}

#[test]
fn density_table_csv() {
    let spec = ReturnDensitySpec::new(
        VarianceLaw::BetaPrime(BetaPrimeParams::new(5.0, 6.0, 0.01).unwrap()),
        1.0,
    )
    .unwrap();
    let table = density_table(&spec, &[-0.1, 0.0, 0.1]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("density.csv");
    write_results(&table, &path, OutputFormat::Csv).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,pdf,cdf"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn output_is_deterministic() {
    let s = series(&[1.0, 2.0, 3.0]);
    assert_eq!(
        render(&s, OutputFormat::Json).unwrap(),
        render(&s, OutputFormat::Json).unwrap()
    );
    assert!("xml".parse::<OutputFormat>().is_err());
    assert_eq!("CSV".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
}

#[test]
fn unwritable_destination_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_such_dir").join("out.json");
    assert!(matches!(
        write_results(&series(&[1.0]), &path, OutputFormat::Json),
        Err(Error::Io { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prices_round_trip(close in prop::collection::vec(1e-6f64..1e9, 1..40)) {
        let s = series(&close);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prices.csv");
        write_results(&s, &path, OutputFormat::Csv).unwrap();
        let back = load_prices(&path, InputFormat::Csv).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn detrended_mean_is_small(seed in 0u64..500) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut p = 100.0;
        let mut close = vec![p];
        for _ in 0..999 {
            p *= (0.001 + 0.01 * rng.random_range(-1.0..1.0f64)).exp();
            close.push(p);
        }
        let z = make_returns(&series(&close), 1, true, true).unwrap().z;
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let sd = (z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        prop_assert!(mean.abs() < 1e-12 * sd.max(1.0) + sd / n);
    }
}
