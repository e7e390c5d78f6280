use crate::assembly::{
    assemble_ldd, init_interface, update_g, InterfaceState, RobinCoupling, StepContext,
};
use crate::error::Result;
use crate::grid::{CellField, Subdomain};
use crate::linalg::GmresStats;
use crate::problem::FlowProblem;

use super::metrics::{error_metrics, InterfaceMetrics};
use super::transient::{initial_iterate, solve_system, Monitor, StepOutcome};
use super::{InterfaceStart, RunConfig, TimeState};

/// One backward Euler step with the decomposed L-scheme.
///
/// Both subdomains are solved concurrently from the previous iterate; the
/// Robin data is then exchanged. Divergence is reported in the outcome, not
/// as an error.
pub fn ldd_time_step(
    problem: &FlowProblem,
    config: &RunConfig,
    state: &TimeState,
    time: f64,
    step: usize,
) -> Result<StepOutcome> {
    config.validate()?;
    let formulation = config.params.formulation;
    let coupling = formulation.coupling();
    let ctx = StepContext {
        problem,
        tau: time - state.time,
        time,
    };
    let mut iface = match (config.interface_start, &state.interface) {
        (InterfaceStart::CarryForward, Some(s)) => s.clone(),
        _ => init_interface(problem, &formulation, &state.pressure)?,
    };
    let mut p_prev = initial_iterate(problem, config, state);
    let mut monitor = Monitor::new(config, time);

    for iteration in 1..=config.max_iterations {
        let solve = |sub: Subdomain| -> Result<Option<(Vec<f64>, GmresStats)>> {
            let sys = assemble_ldd(
                &ctx,
                sub,
                p_prev.part(sub),
                state.pressure.part(sub),
                iface.g(sub),
                &coupling,
                config.params.stabilization[sub.index()],
            )?;
            solve_system(
                &sys,
                p_prev.part(sub),
                &config.gmres,
                config,
                step,
                iteration,
                sub_tag(sub),
            )
        };
        let (one, two) = rayon::join(|| solve(Subdomain::One), || solve(Subdomain::Two));
        let (Some((x1, s1)), Some((x2, s2))) = (one?, two?) else {
            return Ok(monitor.linear_failure(p_prev, Some(iface)));
        };
        let p_new = CellField { parts: [x1, x2] };
        iface.traces = traces(problem, &p_new, &p_prev, &iface, &coupling);
        let next = update_g(&iface, &coupling);
        let report = error_metrics(
            problem,
            iteration,
            &p_new,
            &p_prev,
            Some(InterfaceMetrics {
                state: &iface,
                coupling: &coupling,
                next: Some(&next),
            }),
            vec![s1, s2],
        )?;
        let finite = p_new.all_finite();
        iface = next;
        p_prev = p_new;
        if let Some(done) = monitor.record(report, finite) {
            return Ok(monitor.finish(done, p_prev, Some(iface)));
        }
    }
    Ok(monitor.exhausted(p_prev, Some(iface)))
}

fn sub_tag(sub: Subdomain) -> &'static str {
    match sub {
        Subdomain::One => "omega1",
        Subdomain::Two => "omega2",
    }
}

/// Interface pressures implied by the solved cells, mobilities frozen at `p_frozen`.
fn traces(
    problem: &FlowProblem,
    p: &CellField,
    p_frozen: &CellField,
    iface: &InterfaceState,
    coupling: &RobinCoupling,
) -> [Vec<f64>; 2] {
    let grid = &problem.grid;
    let half = 0.5 * grid.dx;
    let z_gamma = problem.elevation(grid.x_split);
    Subdomain::BOTH.map(|sub| {
        let model = problem.material(sub);
        (0..grid.ny)
            .map(|j| {
                let c = grid.interface_cell(sub, j);
                let dz = z_gamma - problem.elevation(grid.cell_center(sub, c).0);
                let mobility = model.mobility(p_frozen.part(sub)[c]);
                coupling.trace(p.part(sub)[c], iface.g(sub)[j], mobility, half, dz)
            })
            .collect()
    })
}
