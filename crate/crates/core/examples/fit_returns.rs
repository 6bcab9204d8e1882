//! Fit the three variance laws to simulated daily returns by minimizing the
//! KS distance, and compare with the generating parameters.

use mhmvol::calibration::{fit_returns, FitOptions};
use mhmvol::distributions::{bp_from_model, ModelKind, ModelParams};
use mhmvol::sde::{returns_at_lag, simulate, SimConfig};

fn main() -> mhmvol::Result<()> {
    let params = ModelParams::from_squares(0.05, 0.01, 0.02, 2e-4)?;
    let truth = bp_from_model(&params)?;
    println!(
        "true: p = {:.2}, q = {:.2}, beta = {:.2e}",
        truth.p, truth.q, truth.beta
    );

    let cfg = SimConfig::new(0.1, 200_000 * 10, 3)
        .burn_in(50_000)
        .record_every(10);
    let path = simulate(ModelKind::Mhm, &params, &cfg)?;
    let z = returns_at_lag(&path, 1, true)?;

    let opts = FitOptions {
        seed: 3,
        restarts: 2,
        ..FitOptions::default()
    };
    for model in [ModelKind::Mhm, ModelKind::Hm, ModelKind::Mm] {
        let fit = fit_returns(&z, model, &opts)?;
        print!("{model}: KS = {:.4}, theta = {:.3e}", fit.ks, fit.theta());
        if let Some(bp) = fit.beta_prime() {
            print!(", p = {:.2}, q = {:.2}, beta = {:.2e}", bp.p, bp.q, bp.beta);
        }
        if let Some(a) = fit.alpha() {
            print!(", alpha = {a:.3e}");
        }
        println!();
    }
    Ok(())
}
