//! Time stepping with the decomposed L-scheme and the three monolithic baselines.

mod ldd;
mod metrics;
mod monolithic;
mod output;
mod transient;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::assembly::{InterfaceFormulation, InterfaceState};
use crate::error::{invalid, Error, Result};
use crate::grid::CellField;
use crate::linalg::GmresOptions;

pub use ldd::ldd_time_step;
pub use metrics::{
    contraction_rate, error_metrics, mass_balance_defect, max_relative_error, profile,
    InterfaceMetrics, IterationReport, ProfilePoint, RELATIVE_ERROR_GUARD,
};
pub use monolithic::monolithic_time_step;
pub(crate) use output::fmt;
pub use output::{write_iteration_log, write_profile, write_step_summary};
pub use transient::{run_transient, time_levels, StepOutcome, StepReport, TransientReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Decomposed L-scheme with Robin coupling.
    Ldd,
    /// L-scheme on the whole domain.
    Lfv,
    /// Modified Picard on the whole domain.
    Picard,
    Newton,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Ldd,
        SchemeKind::Lfv,
        SchemeKind::Picard,
        SchemeKind::Newton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Ldd => "ldd",
            SchemeKind::Lfv => "lfv",
            SchemeKind::Picard => "picard",
            SchemeKind::Newton => "newton",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                invalid(format!(
                    "unknown scheme '{s}' (expected ldd, lfv, picard or newton)"
                ))
            })
    }
}

/// Linearization and coupling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    /// `L₁, L₂`.
    pub stabilization: [f64; 2],
    pub formulation: InterfaceFormulation,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            stabilization: [0.25, 0.25],
            formulation: InterfaceFormulation::Lambda { lambda: 4.0 },
        }
    }
}

/// Starting iterate `p^{n,0}` of each time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialGuess {
    PreviousTime,
    Constant(f64),
}

/// Where the Robin data of a new time step comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceStart {
    /// Rebuilt from the previous time level's pressure.
    Reinitialize,
    /// The converged data of the previous step.
    CarryForward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub params: SchemeParams,
    /// Stop once the L² increment drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Blowup when the increment exceeds this multiple of the first increment.
    pub divergence_factor: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub tau: f64,
    pub initial_guess: InitialGuess,
    pub interface_start: InterfaceStart,
    /// Subdomain solves take these as given; monolithic solves switch Jacobi on.
    pub gmres: GmresOptions,
    /// Writes every assembled matrix here when set.
    pub dump_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeKind::Ldd,
            params: SchemeParams::default(),
            tolerance: 1e-6,
            max_iterations: 500,
            divergence_factor: 1e6,
            t_start: 0.0,
            t_end: 1.0,
            tau: 1e-2,
            initial_guess: InitialGuess::PreviousTime,
            interface_start: InterfaceStart::Reinitialize,
            gmres: GmresOptions::default(),
            dump_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations < 1 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        if !(self.divergence_factor > 1.0) {
            return Err(invalid(format!(
                "divergence factor must exceed 1, got {}",
                self.divergence_factor
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid(format!(
                "time step must be positive, got {}",
                self.tau
            )));
        }
        if !(self.t_start.is_finite() && self.t_end >= self.t_start) {
            return Err(invalid(format!(
                "time range [{}, {}] is empty or reversed",
                self.t_start, self.t_end
            )));
        }
        if let InitialGuess::Constant(c) = self.initial_guess {
            if !c.is_finite() {
                return Err(invalid("constant initial guess must be finite"));
            }
        }
        self.gmres.validate()?;
        let [l1, l2] = self.params.stabilization;
        match self.scheme {
            SchemeKind::Ldd => {
                if !(l1 > 0.0 && l2 > 0.0) {
                    return Err(invalid(format!(
                        "the decomposed scheme needs L > 0 on both subdomains, got ({l1}, {l2})"
                    )));
                }
                self.params.formulation.validate()?;
            }
            SchemeKind::Lfv => {
                if !(l1 >= 0.0 && l2 >= 0.0) {
                    return Err(invalid(format!("L must be non-negative, got ({l1}, {l2})")));
                }
            }
            SchemeKind::Picard | SchemeKind::Newton => {}
        }
        Ok(())
    }
}

/// Pressure (and Robin data, for the decomposed scheme) at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeState {
    pub time: f64,
    pub pressure: CellField,
    pub interface: Option<InterfaceState>,
}
