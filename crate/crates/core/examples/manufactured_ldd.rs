//! Decomposed L-scheme on the manufactured case, checked against the exact solution.
//!
//! `cargo run --release --example manufactured_ldd -- [dx] [tau] [t_end] [out_dir]`

use std::fs::{self, File};
use std::path::PathBuf;

use richards_ldd::assembly::InterfaceFormulation;
use richards_ldd::cases::manufactured_problem;
use richards_ldd::schemes::{
    profile, run_transient, write_iteration_log, write_profile, RunConfig, SchemeKind, SchemeParams,
};

fn arg(i: usize, default: f64) -> f64 {
    std::env::args()
        .nth(i)
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

fn main() -> richards_ldd::Result<()> {
    let (dx, tau, t_end) = (arg(1, 0.05), arg(2, 1e-3), arg(3, 0.5));
    let out = PathBuf::from(
        std::env::args()
            .nth(4)
            .unwrap_or_else(|| "out/manufactured".into()),
    );
    let problem = manufactured_problem(dx, dx)?;
    let config = RunConfig {
        scheme: SchemeKind::Ldd,
        params: SchemeParams {
            stabilization: [0.25, 0.25],
            formulation: InterfaceFormulation::Lambda { lambda: 4.0 },
        },
        tau,
        t_end,
        ..Default::default()
    };
    let report = run_transient(&problem, &config)?.into_result()?;
    println!(
        "{} steps, {:.1} iterations per step",
        report.steps.len(),
        report.average_inner_iterations()
    );
    for s in report
        .steps
        .iter()
        .step_by((report.steps.len() / 10).max(1))
    {
        println!(
            "t = {:.3}: max relative error {:.3e}",
            s.time,
            s.max_relative_error.unwrap_or(f64::NAN)
        );
    }
    let t = report.final_state.time;
    println!(
        "t = {t:.3}: max relative error {:.3e}",
        report.final_relative_error().unwrap_or(f64::NAN)
    );

    fs::create_dir_all(&out)?;
    write_iteration_log(&report, File::create(out.join("iteration_log.csv"))?)?;
    let line = profile(&problem, &report.final_state.pressure, 0.5, t)?;
    write_profile(&line, File::create(out.join("profile.csv"))?)?;
    println!("wrote {}", out.display());
    Ok(())
}
