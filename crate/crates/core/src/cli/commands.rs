use chrono::NaiveDate;
use serde_json::{Map, Value};

use super::config::{check, positive, require, Resolver};
use super::{input_path, DensityArgs, FitArgs, ModelArgs, MomentsArgs, Run, RvArgs, SimulateArgs};
use crate::calibration::{
    fit_gamma_from_autocov, fit_returns, FitOptions, Objective, RECOMMENDED_FIT_SAMPLES,
};
use crate::data_io::{
    json_opt_real, json_real, load_prices, make_returns, InputFormat, OutputFormat, PriceSeries,
};
use crate::distributions::{
    model_from_bp, BetaPrimeParams, GammaParams, InverseGammaParams, ModelKind, ModelParams,
    VarianceLaw,
};
use crate::error::{Error, Result};
use crate::realized::{loglog_slopes, rv_variance_ratio_curve};
use crate::returns_density::{
    density_table, reduced_moment, return_even_moment, symmetric_grid, ReturnDensitySpec,
};
use crate::sde::{simulate as run_simulation, ReturnDrift, Scheme, SimConfig};

struct ResolvedModel {
    kind: ModelKind,
    law: VarianceLaw,
    /// SDE coefficients, when enough was given to determine them.
    coeffs: Option<ModelParams>,
}

fn parse_model(key: &str, s: &str) -> Result<ModelKind> {
    s.parse().map_err(|_| {
        Error::InvalidConfig(format!(
            "--{key}: unknown model '{s}' (expected mm, hm or mhm)"
        ))
    })
}

fn resolve_model(res: &Resolver, a: ModelArgs) -> Result<ResolvedModel> {
    let kind = parse_model("model", &require("model", res.string("model", a.model)?)?)?;
    let p = res.f64("p", a.p)?;
    let q = res.f64("q", a.q)?;
    let beta = res.f64("beta", a.beta)?;
    let alpha = res.f64("alpha", a.alpha)?;
    let theta = res.f64("theta", a.theta)?;
    let gamma = res.f64("gamma", a.gamma)?;
    let km2 = res.f64("kappa_m_sq", a.kappa_m_sq)?;
    let kh2 = res.f64("kappa_h_sq", a.kappa_h_sq)?;
    let rho = res.f64_or("rho", a.rho, 0.0)?;
    let mu = res.f64_or("mu", a.mu, 0.0)?;

    for (key, v) in [
        ("p", p),
        ("beta", beta),
        ("alpha", alpha),
        ("theta", theta),
        ("gamma", gamma),
    ] {
        if let Some(v) = v {
            positive(key, v)?;
        }
    }
    if let Some(q) = q {
        check(
            "q",
            q > 1.0,
            format!("q > 1 is required for a finite mean, got {q}"),
        )?;
    }
    for (key, v) in [("kappa_m_sq", km2), ("kappa_h_sq", kh2)] {
        if let Some(v) = v {
            check(key, v >= 0.0, format!("must be >= 0, got {v}"))?;
        }
    }
    check(
        "rho",
        (-1.0..=1.0).contains(&rho),
        format!("must lie in [-1, 1], got {rho}"),
    )?;

    let with_drift = |m: ModelParams| ModelParams { rho, mu, ..m };
    let from_coeffs = |km2: f64, kh2: f64| -> Result<ResolvedModel> {
        let g = require("gamma", gamma)?;
        let t = require("theta", theta)?;
        let coeffs = with_drift(ModelParams::from_squares(g, t, km2, kh2)?);
        Ok(ResolvedModel {
            kind,
            law: coeffs.steady_state(kind)?,
            coeffs: Some(coeffs),
        })
    };

    match kind {
        ModelKind::Mhm => match (p, q, beta) {
            (Some(p), Some(q), Some(beta)) => {
                let bp = BetaPrimeParams::new(p, q, beta)?;
                let coeffs = gamma.map(|g| model_from_bp(&bp, g, rho, mu)).transpose()?;
                Ok(ResolvedModel {
                    kind,
                    law: VarianceLaw::BetaPrime(bp),
                    coeffs,
                })
            }
            (None, None, None) => {
                from_coeffs(require("kappa_m_sq", km2)?, require("kappa_h_sq", kh2)?)
            }
            _ => Err(Error::InvalidConfig(
                "--p, --q and --beta must be given together".into(),
            )),
        },
        ModelKind::Hm => match alpha {
            Some(alpha) => {
                let t = require("theta", theta)?;
                check(
                    "alpha",
                    alpha > 1.0,
                    format!("HM needs alpha > 1, got {alpha}"),
                )?;
                let law = VarianceLaw::Gamma(GammaParams::new(alpha, t)?);
                let coeffs = gamma
                    .map(|g| {
                        ModelParams::from_squares(g, t, 0.0, 2.0 * g * t / alpha).map(with_drift)
                    })
                    .transpose()?;
                Ok(ResolvedModel { kind, law, coeffs })
            }
            None => from_coeffs(0.0, require("kappa_h_sq", kh2)?),
        },
        ModelKind::Mm => match alpha {
            Some(alpha) => {
                let t = require("theta", theta)?;
                let law = VarianceLaw::InverseGamma(InverseGammaParams::new(alpha, t)?);
                let coeffs = gamma
                    .map(|g| {
                        ModelParams::from_squares(g, t, 2.0 * g * t / alpha, 0.0).map(with_drift)
                    })
                    .transpose()?;
                Ok(ResolvedModel { kind, law, coeffs })
            }
            None => from_coeffs(require("kappa_m_sq", km2)?, 0.0),
        },
    }
}

fn to_usize(key: &str, v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::InvalidConfig(format!("--{key}: {v} is too large")))
}

pub fn simulate(run: &mut Run, a: SimulateArgs) -> Result<()> {
    let model = resolve_model(&run.res, a.model)?;
    let coeffs = model.coeffs.ok_or_else(|| {
        Error::InvalidConfig("--gamma: the relaxation rate is required to simulate".into())
    })?;
    let res = &run.res;
    let dt = positive("dt", res.f64_or("dt", a.dt, 1.0)?)?;
    let steps = to_usize("steps", res.u64_or("steps", a.steps, 100_000)?)?;
    let burn_in = to_usize("burn_in", res.u64_or("burn_in", a.burn_in, 0)?)?;
    let record_every = to_usize(
        "record_every",
        res.u64_or("record_every", a.record_every, 1)?,
    )?;
    check("steps", steps > 0, "must be positive")?;
    check(
        "burn_in",
        burn_in < steps,
        format!("must be smaller than --steps ({steps})"),
    )?;
    check("record_every", record_every > 0, "must be positive")?;
    let scheme: Scheme = res
        .string_or("scheme", a.scheme, "full_truncation")?
        .parse()
        .map_err(|e| Error::InvalidConfig(format!("--scheme: {e}")))?;
    let drift: ReturnDrift = res
        .string_or("return_drift", a.return_drift, "ito")?
        .parse()
        .map_err(|e| Error::InvalidConfig(format!("--return-drift: {e}")))?;
    let mut cfg = SimConfig::new(dt, steps, run.seed)
        .burn_in(burn_in)
        .record_every(record_every)
        .scheme(scheme)
        .return_drift(drift);
    if let Some(v0) = res.f64("v0", a.v0)? {
        check("v0", v0 >= 0.0, format!("must be >= 0, got {v0}"))?;
        cfg = cfg.v0(v0);
    }
    let want_prices = res.switch("prices", a.prices, false)?;
    if want_prices {
        check(
            "prices",
            (dt * record_every as f64 - 1.0).abs() < 1e-9,
            "prices need exactly one record per day (dt * record_every = 1)",
        )?;
    }

    let path = run_simulation(model.kind, &coeffs, &cfg)?;
    let name = format!("path.{}", run.extension());
    run.emit(&name, &path, run.format)?;
    if want_prices {
        let series = prices_from_log(&path.log_prices())?;
        run.emit("prices.csv", &series, OutputFormat::Csv)?;
    }
    Ok(())
}

/// Daily closes S = 100·e^{ln S/S₀} on consecutive calendar dates.
fn prices_from_log(log_prices: &[f64]) -> Result<PriceSeries> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let dates = (0..log_prices.len())
        .map(|i| start + chrono::Days::new(i as u64))
        .collect();
    PriceSeries::new(dates, log_prices.iter().map(|l| 100.0 * l.exp()).collect())
}

fn load_input(run: &Run) -> Result<PriceSeries> {
    load_prices(input_path(run)?, InputFormat::Csv)
}

fn estimate_gamma(prices: &PriceSeries, detrend: bool, max_lag: usize) -> Result<f64> {
    let z1 = make_returns(prices, 1, true, detrend)?;
    Ok(fit_gamma_from_autocov(&z1, (1, max_lag))?.gamma)
}

pub fn fit(run: &mut Run, a: FitArgs) -> Result<()> {
    let res = &run.res;
    let models: Vec<ModelKind> = res
        .string_or("model", a.model, "mhm")?
        .split(',')
        .map(|s| parse_model("model", s.trim()))
        .collect::<Result<_>>()?;
    let taus = res.u32_list("taus", a.taus, "1")?;
    let objective: Objective = res
        .string_or("objective", a.objective, "ks")?
        .parse()
        .map_err(|e| Error::InvalidConfig(format!("--objective: {e}")))?;
    let overlapping = !res.switch("non_overlapping", a.non_overlapping, false)?;
    let detrend = !res.switch("no_detrend", a.no_detrend, false)?;
    let mut gamma = res.f64("gamma", a.gamma)?;
    if let Some(g) = gamma {
        positive("gamma", g)?;
    }
    let fit_gamma = res.switch("fit_gamma", a.fit_gamma, false)?;
    let max_lag = to_usize("max_lag", res.u64_or("max_lag", a.max_lag, 100)?)?;
    check("max_lag", max_lag >= 1, "must be at least 1")?;
    let restarts = to_usize("restarts", res.u64_or("restarts", a.restarts, 3)?)?;

    let prices = load_input(run)?;
    if gamma.is_none() && fit_gamma {
        gamma = Some(estimate_gamma(&prices, detrend, max_lag)?);
    }
    let opts = FitOptions {
        objective,
        restarts,
        seed: run.seed,
        ..FitOptions::default()
    };
    let mut results = Vec::with_capacity(taus.len() * models.len());
    for &tau in &taus {
        let z = make_returns(&prices, tau, overlapping, detrend)?;
        if z.n() < RECOMMENDED_FIT_SAMPLES {
            eprintln!(
                "warning: tau={tau}: only {} returns; fits below {RECOMMENDED_FIT_SAMPLES} are unreliable",
                z.n()
            );
        }
        for &model in &models {
            let mut r = fit_returns(&z, model, &opts)?;
            if let Some(g) = gamma {
                r = r.with_gamma(g);
            }
            results.push(r);
        }
    }
    let name = format!("fit.{}", run.extension());
    run.emit(&name, &results, run.format)?;
    Ok(())
}

pub fn density(run: &mut Run, a: DensityArgs) -> Result<()> {
    let model = resolve_model(&run.res, a.model)?;
    let res = &run.res;
    let tau = positive("tau", res.f64_or("tau", a.tau, 1.0)?)?;
    let spec = ReturnDensitySpec::new(model.law, tau)?;
    let z_max = positive("z_max", res.f64_or("z_max", a.z_max, 10.0 * spec.scale())?)?;
    let points = to_usize("points", res.u64_or("points", a.points, 401)?)?;
    check("points", points >= 2, "must be at least 2")?;
    let table = density_table(&spec, &symmetric_grid(z_max, points))?;
    let name = format!("density.{}", run.extension());
    run.emit(&name, &table, run.format)?;
    Ok(())
}

fn moment_or_null(n: u32, spec: &ReturnDensitySpec) -> Result<Option<f64>> {
    match return_even_moment(n, spec) {
        Ok(m) => Ok(Some(m)),
        Err(Error::MomentDoesNotExist { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn moments(run: &mut Run, a: MomentsArgs) -> Result<()> {
    let model = resolve_model(&run.res, a.model)?;
    let res = &run.res;
    let taus = res.u32_list("taus", a.taus, "1")?;
    let overlapping = !res.switch("non_overlapping", a.non_overlapping, false)?;
    let detrend = !res.switch("no_detrend", a.no_detrend, false)?;
    let prices = match run.input {
        Some(_) => Some(load_input(run)?),
        None => None,
    };

    let mut rows = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let spec = ReturnDensitySpec::new(model.law, f64::from(tau))?;
        let theory = [moment_or_null(1, &spec)?, moment_or_null(2, &spec)?];
        let mut row = Map::new();
        row.insert("model".into(), Value::String(model.kind.to_string()));
        row.insert("tau".into(), Value::from(tau));
        row.insert("theory_z2".into(), json_opt_real(theory[0]));
        row.insert("theory_z4".into(), json_opt_real(theory[1]));
        let mut empirical = [None, None];
        let mut n = None;
        if let Some(prices) = &prices {
            let z = make_returns(prices, tau, overlapping, detrend)?;
            let len = z.n() as f64;
            empirical = [
                Some(z.z.iter().map(|x| x * x).sum::<f64>() / len),
                Some(z.z.iter().map(|x| x.powi(4)).sum::<f64>() / len),
            ];
            n = Some(z.n());
        }
        row.insert("empirical_z2".into(), json_opt_real(empirical[0]));
        row.insert("empirical_z4".into(), json_opt_real(empirical[1]));
        for (k, key) in [(0usize, "reduced_1"), (1, "reduced_2")] {
            let reduced = match (empirical[k], theory[k]) {
                (Some(e), Some(t)) => Some(reduced_moment(e, t, k as u32 + 1)),
                _ => None,
            };
            row.insert(key.into(), json_opt_real(reduced));
        }
        row.insert("n".into(), n.map_or(Value::Null, Value::from));
        rows.push(Value::Object(row));
    }
    let name = format!("moments.{}", run.extension());
    run.emit(&name, &rows, run.format)?;
    Ok(())
}

pub fn rv(run: &mut Run, a: RvArgs) -> Result<()> {
    let res = &run.res;
    let grid = res.u32_list("t_grid", a.t_grid, "1,2,3,5,10,20,50,100,200,500")?;
    let detrend = !res.switch("no_detrend", a.no_detrend, false)?;
    let max_lag = to_usize("max_lag", res.u64_or("max_lag", a.max_lag, 100)?)?;
    let gamma_flag = res.f64("gamma", a.gamma)?;
    if let Some(g) = gamma_flag {
        positive("gamma", g)?;
    }
    let split_flag = res.f64("split_t", a.split_t)?;
    if let Some(s) = split_flag {
        positive("split_t", s)?;
    }

    let prices = load_input(run)?;
    let (gamma, source) = match gamma_flag {
        Some(g) => (g, "flag"),
        None => (estimate_gamma(&prices, detrend, max_lag)?, "autocov"),
    };
    let z1 = make_returns(&prices, 1, true, detrend)?;
    let curve = rv_variance_ratio_curve(&z1, &grid)?.with_gamma(gamma);
    let split = split_flag.unwrap_or(1.0 / gamma);
    let slopes = loglog_slopes(&curve, split).ok();

    let name = format!("rv_curve.{}", run.extension());
    run.emit(&name, &curve, run.format)?;
    let mut summary = Map::new();
    summary.insert("gamma".into(), json_real(gamma));
    summary.insert("gamma_source".into(), Value::String(source.into()));
    summary.insert("var_v".into(), json_real(curve.var_v));
    summary.insert("split_T".into(), json_real(split));
    summary.insert("slope_small".into(), json_opt_real(slopes.map(|s| s.0)));
    summary.insert("slope_large".into(), json_opt_real(slopes.map(|s| s.1)));
    run.emit(
        "rv_slopes.json",
        &Value::Object(summary),
        OutputFormat::Json,
    )?;
    Ok(())
}
