//! var(RV_T)/var[v] against window length, from a simulated path and from its
//! daily returns, next to the reference f(γT).

use mhmvol::distributions::{ModelKind, ModelParams};
use mhmvol::realized::{f_gamma_t, loglog_slopes, path_rv_ratio_curve, rv_variance_ratio_curve};
use mhmvol::sde::{returns_at_lag, simulate, SimConfig};

fn main() -> mhmvol::Result<()> {
    let gamma = 0.05;
    let params = ModelParams::from_squares(gamma, 1e-4, 0.02, 1e-6)?;
    let cfg = SimConfig::new(0.1, 5_000_000, 5).record_every(10);
    let path = simulate(ModelKind::Mhm, &params, &cfg)?;

    let grid = [1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000, 2000];
    let from_path = path_rv_ratio_curve(&path, &grid)?;
    let from_returns = rv_variance_ratio_curve(&returns_at_lag(&path, 1, true)?, &grid)?;

    println!(
        "{:>6} {:>10} {:>10} {:>10}",
        "T", "path", "returns", "f(gT)"
    );
    for (i, t) in from_path.t.iter().enumerate() {
        println!(
            "{t:6} {:10.4} {:10.4} {:10.4}",
            from_path.ratio[i],
            from_returns.ratio[i],
            f_gamma_t(gamma * t)
        );
    }
    // The returns curve carries extra Gaussian noise ~2E[v^2]/T at short windows.
    let (small, large) = loglog_slopes(&from_path, 1.0 / gamma)?;
    println!("log-log slopes: {small:.3} below 1/gamma, {large:.3} above");
    Ok(())
}
