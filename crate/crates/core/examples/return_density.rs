//! Return densities: the MHM closed form against the generic mixture integral,
//! plus a tabulated grid written as CSV.

use mhmvol::data_io::{write_results, OutputFormat};
use mhmvol::distributions::{BetaPrimeParams, GammaParams, VarianceLaw};
use mhmvol::returns_density::{
    density_table, mhm_return_pdf, pd_return_pdf, return_even_moment, symmetric_grid,
    ReturnDensitySpec,
};

fn main() -> mhmvol::Result<()> {
    let bp = BetaPrimeParams::new(5.0, 6.0, 1e-2)?;
    let tau = 5.0;
    let spec = ReturnDensitySpec::new(VarianceLaw::BetaPrime(bp), tau)?;

    println!(
        "{:>8} {:>14} {:>14} {:>9}",
        "z", "closed form", "mixture", "rel diff"
    );
    for z in [0.0, 0.05, 0.1, 0.2, 0.4, 0.8] {
        let a = mhm_return_pdf(z, &bp, tau)?;
        let b = pd_return_pdf(z, &spec)?;
        println!("{z:8.2} {a:14.8e} {b:14.8e} {:9.1e}", ((a - b) / a).abs());
    }

    let kurt = return_even_moment(2, &spec)? / return_even_moment(1, &spec)?.powi(2);
    println!("kurtosis: {kurt:.3}");

    let ga = ReturnDensitySpec::new(VarianceLaw::Gamma(GammaParams::new(2.0, 1e-4)?), 1.0)?;
    let table = density_table(&ga, &symmetric_grid(10.0 * ga.scale(), 201))?;
    let out = std::env::temp_dir().join("gamma_density.csv");
    write_results(&table, &out, OutputFormat::Csv)?;
    println!("wrote {}", out.display());
    Ok(())
}
