use crate::assembly::{assemble_monolithic, MonolithicKind, StepContext};
use crate::error::{invalid, Result};
use crate::grid::CellField;
use crate::problem::FlowProblem;

use super::metrics::error_metrics;
use super::transient::{initial_iterate, solve_system, Monitor, StepOutcome};
use super::{RunConfig, SchemeKind, TimeState};

/// One backward Euler step of a whole-domain scheme.
pub fn monolithic_time_step(
    problem: &FlowProblem,
    config: &RunConfig,
    state: &TimeState,
    time: f64,
    step: usize,
) -> Result<StepOutcome> {
    config.validate()?;
    let kind = match config.scheme {
        SchemeKind::Lfv => MonolithicKind::LScheme,
        SchemeKind::Picard => MonolithicKind::Picard,
        SchemeKind::Newton => MonolithicKind::Newton,
        SchemeKind::Ldd => return Err(invalid("the decomposed scheme is not monolithic")),
    };
    let ctx = StepContext {
        problem,
        tau: time - state.time,
        time,
    };
    let gmres = config.gmres.with_jacobi(true);
    let mut p_prev = initial_iterate(problem, config, state);
    let mut monitor = Monitor::new(config, time);

    for iteration in 1..=config.max_iterations {
        let sys = assemble_monolithic(
            kind,
            &ctx,
            &p_prev,
            &state.pressure,
            config.params.stabilization,
        )?;
        let prev = p_prev.to_monolithic();
        let x0 = match kind {
            MonolithicKind::Newton => vec![0.0; prev.len()],
            _ => prev.clone(),
        };
        let Some((x, stats)) = solve_system(&sys, &x0, &gmres, config, step, iteration, "full")?
        else {
            return Ok(monitor.linear_failure(p_prev, None));
        };
        let values = match kind {
            MonolithicKind::Newton => prev.iter().zip(&x).map(|(p, d)| p + d).collect(),
            _ => x,
        };
        let p_new = CellField::from_monolithic(&problem.grid, &values)?;
        let report = error_metrics(problem, iteration, &p_new, &p_prev, None, vec![stats])?;
        let finite = p_new.all_finite();
        p_prev = p_new;
        if let Some(done) = monitor.record(report, finite) {
            return Ok(monitor.finish(done, p_prev, None));
        }
    }
    Ok(monitor.exhausted(p_prev, None))
}
