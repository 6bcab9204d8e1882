//! Price CSV in, detrended returns, theoretical vs empirical moments out.

use chrono::{Days, NaiveDate};
use mhmvol::data_io::{
    load_prices, make_returns, write_results, InputFormat, OutputFormat, PriceSeries,
};
use mhmvol::distributions::{ModelKind, ModelParams};
use mhmvol::returns_density::{reduced_moment, return_even_moment, ReturnDensitySpec};
use mhmvol::sde::{simulate, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::from_squares(0.05, 1e-4, 0.02, 1e-6)?;
    let path = simulate(ModelKind::Mhm, &params, &SimConfig::new(1.0, 20_000, 11))?;

    let start = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
    let dates = (0..path.len() as u64)
        .map(|d| start + Days::new(d))
        .collect();
    let close = path.log_prices().iter().map(|x| 100.0 * x.exp()).collect();
    let prices = PriceSeries::new(dates, close)?;

    let dir = tempfile::tempdir()?;
    let file = dir.path().join("prices.csv");
    write_results(&prices, &file, OutputFormat::Csv)?;
    let loaded = load_prices(&file, InputFormat::Csv)?;
    println!("round-tripped {} prices", loaded.len());

    let law = params.steady_state(ModelKind::Mhm)?;
    for tau in [1, 5, 20] {
        let z = make_returns(&loaded, tau, true, true)?;
        let spec = ReturnDensitySpec::new(law, f64::from(tau))?;
        let m2 = z.z.iter().map(|x| x * x).sum::<f64>() / z.n() as f64;
        let m4 = z.z.iter().map(|x| x.powi(4)).sum::<f64>() / z.n() as f64;
        println!(
            "tau {tau:2}: E[z^2] ratio {:.3}, E[z^4] ratio {:.3}",
            reduced_moment(m2, return_even_moment(1, &spec)?, 1),
            reduced_moment(m4, return_even_moment(2, &spec)?, 2),
        );
    }
    Ok(())
}
