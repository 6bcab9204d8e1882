//! Simulate the MHM variance and log price, then check the path against its
//! stationary law.

use mhmvol::calibration::ks_statistic;
use mhmvol::distributions::{ModelKind, ModelParams};
use mhmvol::sde::{simulate, step_identity_check, SimConfig};

fn main() -> mhmvol::Result<()> {
    let params = ModelParams::from_squares(0.05, 1e-4, 0.02, 1e-6)?;
    let law = params.steady_state(ModelKind::Mhm)?;

    let cfg = SimConfig::new(0.1, 2_000_000, 7)
        .burn_in(20_000)
        .record_every(10);
    let path = simulate(ModelKind::Mhm, &params, &cfg)?;
    println!("{} daily records", path.len());

    let mean_v = path.v.iter().sum::<f64>() / path.len() as f64;
    println!("sample E[v] = {mean_v:.4e} (stationary {:.4e})", law.mean());

    // Decimate to roughly independent draws before comparing distributions.
    let mut sample: Vec<f64> = path.v.iter().step_by(60).copied().collect();
    sample.sort_by(f64::total_cmp);
    let ks = ks_statistic(&sample, |v| law.cdf(v))?;
    println!(
        "KS distance to the stationary law over {} points: {ks:.4}",
        sample.len()
    );

    let r = step_identity_check(&path);
    println!(
        "dS/S - d ln S - v dt/2: rms {:.2e}, max {:.2e}",
        r.rms, r.max_abs
    );
    Ok(())
}
