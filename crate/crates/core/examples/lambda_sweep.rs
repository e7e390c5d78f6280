//! Contraction rate of the decomposed scheme against the Robin weight λ, for two values of L.

use richards_ldd::config::ConfigFile;
use richards_ldd::studies::cmd_sweep;

fn main() -> richards_ldd::Result<()> {
    let config = ConfigFile::parse(
        r#"
        [grid]
        dx = 0.02

        [run]
        tau = 0.01

        [sweep]
        lambda = [0.5, 1.0, 2.0, 4.0, 6.0, 10.0, 20.0, 40.0]
        l = [0.25, 0.5]
        snapshot = 0.2
        "#,
    )?;
    config.validate()?;
    let report = cmd_sweep(&config)?;
    for l in [0.25, 0.5] {
        let rows = report.group(l, 0.01, 0.02);
        let best = rows.first().and_then(|r| r.lambda_opt);
        println!("L = {l}: λ_opt = {best:?}");
        for r in rows {
            match r.geometric_rate() {
                Some(g) => println!(
                    "  λ = {:>5}: rate {g:.3} after {} iterations",
                    r.point.lambda, r.iterations
                ),
                None => println!("  λ = {:>5}: no rate ({:?})", r.point.lambda, r.divergence),
            }
        }
    }
    Ok(())
}
