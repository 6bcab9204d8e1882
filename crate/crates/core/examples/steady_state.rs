//! Stationary variance laws of the three models and how MHM nests the others.

use mhmvol::distributions::{bp_from_model, ModelKind, ModelParams, VarianceLaw};

fn main() -> mhmvol::Result<()> {
    let params = ModelParams::from_squares(0.05, 1e-4, 0.02, 1e-6)?;
    let bp = bp_from_model(&params)?;
    println!(
        "MHM: p = {:.3}, q = {:.3}, beta = {:.3e}, mean = {:.3e}",
        bp.p,
        bp.q,
        bp.beta,
        bp.mean()
    );

    for model in [ModelKind::Mhm, ModelKind::Hm, ModelKind::Mm] {
        let law = params.steady_state(model)?;
        println!(
            "\n{model}: E[v] = {:.4e}, E[v^2] = {:.4e}",
            law.mean(),
            law.moment(2)?
        );
        for v in [2e-5, 5e-5, 1e-4, 2e-4, 5e-4] {
            println!(
                "  v = {v:.0e}  pdf = {:10.4}  cdf = {:.6}",
                law.pdf(v)?,
                law.cdf(v)?
            );
        }
    }

    // Switching off one noise source recovers the single-noise laws.
    let hm_like =
        ModelParams::from_squares(0.05, 1e-4, 1e-9, 1e-6)?.steady_state(ModelKind::Mhm)?;
    let hm = ModelParams::from_squares(0.05, 1e-4, 0.0, 1e-6)?.steady_state(ModelKind::Hm)?;
    let v = 1.3e-4;
    println!(
        "\nkappa_M -> 0: MHM pdf {:.6} vs HM pdf {:.6}",
        hm_like.pdf(v)?,
        hm.pdf(v)?
    );
    if let VarianceLaw::BetaPrime(b) = hm_like {
        println!("  (q = {:.3e})", b.q);
    }
    Ok(())
}
