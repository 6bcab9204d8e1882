//! Recover the relaxation rate γ from the autocovariance of squared returns,
//! then turn a fitted Beta-prime law into noise amplitudes.

use mhmvol::calibration::{fit_gamma_from_autocov, kappas_from_fit, squared_return_autocov};
use mhmvol::distributions::{bp_from_model, ModelKind, ModelParams};
use mhmvol::sde::{returns_at_lag, simulate, SimConfig};

fn main() -> mhmvol::Result<()> {
    let params = ModelParams::from_squares(0.05, 1e-4, 0.02, 1e-6)?;
    let cfg = SimConfig::new(0.1, 10_000_000, 5)
        .burn_in(50_000)
        .record_every(10);
    let z = returns_at_lag(&simulate(ModelKind::Mhm, &params, &cfg)?, 1, true)?;

    let cov = squared_return_autocov(&z, (1, 5))?;
    let shown: Vec<String> = cov.iter().map(|c| format!("{c:.3e}")).collect();
    println!("cov[z^2] at lags 1..5: {}", shown.join(", "));

    let fit = fit_gamma_from_autocov(&z, (1, 100))?;
    println!(
        "gamma = {:.4} (true 0.05), var[v] = {:.3e}",
        fit.gamma, fit.var_v_hat
    );

    let (km2, kh2) = kappas_from_fit(&bp_from_model(&params)?, fit.gamma)?;
    println!("kappa_M^2 = {km2:.4} (true 0.02), kappa_H^2 = {kh2:.3e} (true 1e-6)");
    Ok(())
}
