//! Saturation, relative permeability and mobility of the built-in materials.
//!
//! Prints a table per material and the sampled structural bounds that feed
//! the time-step estimate.

use richards_ldd::cases::RealisticCase;
use richards_ldd::constitutive::{verify_assumptions, ConstitutiveModel};

fn table(name: &str, model: &ConstitutiveModel, p_min: f64) -> richards_ldd::Result<()> {
    println!("{name}");
    println!(
        "{:>10} {:>12} {:>12} {:>12} {:>12}",
        "p", "S", "S'", "k", "mobility"
    );
    for i in 0..=10 {
        let p = p_min * (1.0 - i as f64 / 10.0) - 1e-3 * (i as f64 / 10.0);
        println!(
            "{p:>10.4} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
            model.saturation(p),
            model.saturation_derivative(p),
            model.rel_perm(p),
            model.mobility(p)
        );
    }
    let r = verify_assumptions(model, p_min, -1e-3, 2000)?;
    println!(
        "monotone S {} k {}, L_S ~ {:.4}, L_k ~ {:.4}, min mobility {:.4e}\n",
        r.saturation_monotone,
        r.rel_perm_monotone,
        r.lipschitz_saturation,
        r.lipschitz_rel_perm,
        r.mobility_lower
    );
    Ok(())
}

fn main() -> richards_ldd::Result<()> {
    table("power law, l = 1", &ConstitutiveModel::power_law(1)?, -5.0)?;
    table("power law, l = 2", &ConstitutiveModel::power_law(2)?, -5.0)?;
    let scaled = RealisticCase::default().scaled()?;
    for (name, m) in ["silt loam (scaled)", "sandstone (scaled)"]
        .iter()
        .zip(&scaled)
    {
        table(name, &m.model()?, -2.0)?;
    }
    Ok(())
}
