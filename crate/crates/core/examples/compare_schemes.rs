//! One time step of every scheme from the same state: increments per iteration.
//!
//! Newton drops superlinearly; Picard and both L-schemes contract at a fixed rate.

use richards_ldd::assembly::InterfaceFormulation;
use richards_ldd::cases::manufactured_problem;
use richards_ldd::schemes::{run_transient, RunConfig, SchemeKind, SchemeParams};

fn main() -> richards_ldd::Result<()> {
    let problem = manufactured_problem(0.1, 0.1)?;
    for scheme in [
        SchemeKind::Newton,
        SchemeKind::Picard,
        SchemeKind::Ldd,
        SchemeKind::Lfv,
    ] {
        let mut config = RunConfig {
            scheme,
            params: SchemeParams {
                stabilization: [0.25, 0.25],
                formulation: InterfaceFormulation::Lambda { lambda: 4.0 },
            },
            tau: 1e-3,
            t_start: 0.199,
            t_end: 0.2,
            tolerance: 1e-12,
            ..Default::default()
        };
        config.gmres.tolerance = 1e-14;
        let report = run_transient(&problem, &config)?;
        let step = &report.steps[0];
        let increments: Vec<String> = step
            .l2_increments()
            .iter()
            .map(|v| format!("{v:.2e}"))
            .collect();
        let rate = step.contraction_rate().map_or(f64::NAN, |(_, g)| g);
        println!(
            "{scheme:>6}: {} iterations, rate {rate:.3}",
            increments.len()
        );
        println!("        {}", increments.join(" "));
    }
    Ok(())
}
