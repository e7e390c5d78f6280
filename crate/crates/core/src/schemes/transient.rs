use std::fs::{self, File};
use std::io::BufWriter;

use crate::assembly::{InterfaceState, SubdomainSystem};
use crate::error::{DivergenceKind, Error, Result};
use crate::grid::CellField;
use crate::linalg::{gmres, GmresOptions, GmresStats};
use crate::problem::FlowProblem;

use super::metrics::{contraction_rate, max_relative_error, IterationReport};
use super::{ldd_time_step, monolithic_time_step, InitialGuess, RunConfig, SchemeKind, TimeState};

/// Result of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// The last iterate, converged or not.
    pub state: TimeState,
    pub iterations: Vec<IterationReport>,
    pub divergence: Option<DivergenceKind>,
}

impl StepOutcome {
    pub fn converged(&self) -> bool {
        self.divergence.is_none()
    }
}

pub(crate) enum Done {
    Converged,
    Diverged(DivergenceKind),
}

/// Stopping and divergence bookkeeping shared by all schemes.
pub(crate) struct Monitor {
    tolerance: f64,
    factor: f64,
    time: f64,
    first: Option<f64>,
    reports: Vec<IterationReport>,
}

impl Monitor {
    pub fn new(config: &RunConfig, time: f64) -> Self {
        Self {
            tolerance: config.tolerance,
            factor: config.divergence_factor,
            time,
            first: None,
            reports: Vec::new(),
        }
    }

    pub fn record(&mut self, report: IterationReport, finite: bool) -> Option<Done> {
        let inc = report.l2_increment;
        let ok = finite && report.is_finite();
        self.reports.push(report);
        if !ok {
            return Some(Done::Diverged(DivergenceKind::NonFinite));
        }
        let first = *self.first.get_or_insert(inc);
        if inc < self.tolerance {
            return Some(Done::Converged);
        }
        if first > 0.0 && inc > self.factor * first {
            return Some(Done::Diverged(DivergenceKind::Blowup));
        }
        None
    }

    fn outcome(
        self,
        divergence: Option<DivergenceKind>,
        p: CellField,
        iface: Option<InterfaceState>,
    ) -> StepOutcome {
        StepOutcome {
            state: TimeState {
                time: self.time,
                pressure: p,
                interface: iface,
            },
            iterations: self.reports,
            divergence,
        }
    }

    pub fn finish(self, done: Done, p: CellField, iface: Option<InterfaceState>) -> StepOutcome {
        let kind = match done {
            Done::Converged => None,
            Done::Diverged(k) => Some(k),
        };
        self.outcome(kind, p, iface)
    }

    pub fn exhausted(self, p: CellField, iface: Option<InterfaceState>) -> StepOutcome {
        self.outcome(Some(DivergenceKind::IterationLimit), p, iface)
    }

    pub fn linear_failure(self, p: CellField, iface: Option<InterfaceState>) -> StepOutcome {
        self.outcome(Some(DivergenceKind::LinearSolve), p, iface)
    }
}

pub(crate) fn initial_iterate(
    problem: &FlowProblem,
    config: &RunConfig,
    state: &TimeState,
) -> CellField {
    match config.initial_guess {
        InitialGuess::PreviousTime => state.pressure.clone(),
        InitialGuess::Constant(c) => CellField::constant(&problem.grid, c),
    }
}

/// GMRES on an assembled system; `None` when the solver does not reach its tolerance.
pub(crate) fn solve_system(
    sys: &SubdomainSystem,
    x0: &[f64],
    opts: &GmresOptions,
    config: &RunConfig,
    step: usize,
    iteration: usize,
    tag: &str,
) -> Result<Option<(Vec<f64>, GmresStats)>> {
    let a = sys.matrix.to_csr()?;
    if let Some(dir) = &config.dump_dir {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("step{step:04}_iter{iteration:03}_{tag}.txt"));
        a.write_coordinates(BufWriter::new(File::create(path)?))?;
    }
    match gmres(&a, &sys.rhs, x0, opts) {
        Ok((x, stats)) if stats.converged => Ok(Some((x, stats))),
        Ok(_) | Err(Error::Breakdown { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Summary of one time step within a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// 1-based.
    pub step: usize,
    pub time: f64,
    pub iterations: Vec<IterationReport>,
    pub divergence: Option<DivergenceKind>,
    /// Against the exact solution, when the problem has one.
    pub max_relative_error: Option<f64>,
}

impl StepReport {
    pub fn converged(&self) -> bool {
        self.divergence.is_none()
    }

    pub fn l2_increments(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.l2_increment).collect()
    }

    /// Contraction rate of the L² increments, if there are at least two.
    pub fn contraction_rate(&self) -> Option<(f64, f64)> {
        contraction_rate(&self.l2_increments()).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientReport {
    pub steps: Vec<StepReport>,
    /// State after the last step taken.
    pub final_state: TimeState,
    /// Step index and kind of the first divergence; the run stops there.
    pub failure: Option<(usize, DivergenceKind)>,
}

impl TransientReport {
    pub fn converged(&self) -> bool {
        self.failure.is_none()
    }

    pub fn total_gmres_iterations(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| &s.iterations)
            .map(IterationReport::gmres_iterations)
            .sum()
    }

    pub fn average_inner_iterations(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().map(|s| s.iterations.len()).sum::<usize>() as f64
            / self.steps.len() as f64
    }

    /// Largest relative error over all steps.
    pub fn max_relative_error(&self) -> Option<f64> {
        self.steps
            .iter()
            .filter_map(|s| s.max_relative_error)
            .fold(None, |m, e| Some(m.map_or(e, |m: f64| m.max(e))))
    }

    /// Relative error at the last time level reached, the spatial maximum only.
    pub fn final_relative_error(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.max_relative_error)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.failure {
            Some((step, kind)) => Err(Error::Diverged { step, kind }),
            None => Ok(self),
        }
    }
}

/// `t_start < t_1 < … < t_N = t_end` with uniform steps, the last one possibly shorter.
pub fn time_levels(t_start: f64, t_end: f64, tau: f64) -> Vec<f64> {
    let n = ((t_end - t_start) / tau - 1e-9).ceil().max(0.0) as usize;
    (1..=n)
        .map(|k| (t_start + k as f64 * tau).min(t_end))
        .collect()
}

/// Backward Euler from `t_start` to `t_end`, starting from the problem's
/// initial pressure evaluated at `t_start`. Stops at the first divergent step.
pub fn run_transient(problem: &FlowProblem, config: &RunConfig) -> Result<TransientReport> {
    config.validate()?;
    problem.validate()?;
    let t0 = config.t_start;
    let mut state = TimeState {
        time: t0,
        pressure: problem
            .grid
            .sample(|sub, x, y| (problem.initial)(sub, x, y, t0)),
        interface: None,
    };
    let mut steps = Vec::new();
    let mut failure = None;
    for (k, time) in time_levels(t0, config.t_end, config.tau)
        .into_iter()
        .enumerate()
    {
        let step = k + 1;
        let outcome = match config.scheme {
            SchemeKind::Ldd => ldd_time_step(problem, config, &state, time, step)?,
            _ => monolithic_time_step(problem, config, &state, time, step)?,
        };
        let max_relative_error = if outcome.converged() {
            max_relative_error(problem, &outcome.state.pressure, time)?
        } else {
            None
        };
        steps.push(StepReport {
            step,
            time,
            iterations: outcome.iterations,
            divergence: outcome.divergence,
            max_relative_error,
        });
        state = outcome.state;
        if let Some(kind) = outcome.divergence {
            failure = Some((step, kind));
            break;
        }
    }
    Ok(TransientReport {
        steps,
        final_state: state,
        failure,
    })
}
