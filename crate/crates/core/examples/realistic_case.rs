//! Infiltration into a silt loam over sandstone, decomposed L-scheme against Picard.

use richards_ldd::assembly::InterfaceFormulation;
use richards_ldd::cases::RealisticCase;
use richards_ldd::schemes::{profile, run_transient, RunConfig, SchemeKind, SchemeParams};

fn main() -> richards_ldd::Result<()> {
    let case = RealisticCase::default();
    let problem = case.problem(0.02, 0.02)?;
    for (scheme, l) in [(SchemeKind::Ldd, 0.5), (SchemeKind::Picard, 0.0)] {
        let config = RunConfig {
            scheme,
            params: SchemeParams {
                stabilization: [l, l],
                formulation: InterfaceFormulation::Lambda { lambda: 10.0 },
            },
            tau: 0.01,
            t_end: 0.2,
            ..Default::default()
        };
        let report = run_transient(&problem, &config)?;
        let iterations: Vec<usize> = report.steps.iter().map(|s| s.iterations.len()).collect();
        match report.failure {
            None => println!("{scheme}: converged, iterations per step {iterations:?}"),
            Some((step, kind)) => println!("{scheme}: diverged at step {step} ({kind})"),
        }
        if scheme == SchemeKind::Ldd {
            let t = report.final_state.time;
            for point in profile(&problem, &report.final_state.pressure, 0.5, t)?
                .iter()
                .step_by(10)
            {
                println!("  x = {:+.2}: p = {:.4}", point.x, point.p_num);
            }
        }
    }
    Ok(())
}
