//! The sufficient time-step bound for a few stabilizations, with sampled material bounds.

use richards_ldd::constitutive::{tau_max, verify_assumptions, ConstitutiveModel, MaterialBounds};

fn main() -> richards_ldd::Result<()> {
    let model = ConstitutiveModel::power_law(1)?;
    let sampled = verify_assumptions(&model, -10.0, -0.5, 4000)?;
    // the gradient bound is problem dependent; 2 covers the manufactured solution
    let bounds = MaterialBounds::new(
        sampled.lipschitz_saturation,
        sampled.lipschitz_rel_perm,
        sampled.mobility_lower,
        2.0,
    )?;
    println!("{bounds:?}");
    for l in [0.1, 0.25, 0.5, 1.0, 2.0] {
        match tau_max(&bounds, l) {
            Ok(t) => println!("L = {l}: τ_max = {t:.4e}"),
            Err(e) => println!("L = {l}: {e}"),
        }
    }
    Ok(())
}
