//! Flat TOML run configuration.
//!
//! Every section is optional and falls back to the library defaults. A file
//! is checked in full by [`ConfigFile::validate`] before anything runs.
//!
//! ```toml
//! [case]
//! kind = "manufactured"
//!
//! [grid]
//! dx = 0.02
//!
//! [scheme]
//! kind = "ldd"
//! l = 0.25
//! lambda = 4.0
//!
//! [run]
//! t_end = 0.2
//! tau = 0.01
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::InterfaceFormulation;
use crate::cases::{manufactured_problem_with, ManufacturedBoundary, RealisticCase};
use crate::constitutive::MaterialBounds;
use crate::error::{Error, Result};
use crate::linalg::GmresOptions;
use crate::problem::FlowProblem;
use crate::schemes::{InitialGuess, InterfaceStart, RunConfig, SchemeKind, SchemeParams};

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    #[default]
    Manufactured,
    Realistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryChoice {
    #[default]
    NoFlowBottom,
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseSection {
    pub kind: CaseKind,
    /// Manufactured case only.
    pub boundary: BoundaryChoice,
    /// Realistic case only: cap of the left boundary pressure.
    pub epsilon: f64,
}

impl Default for CaseSection {
    fn default() -> Self {
        Self {
            kind: CaseKind::Manufactured,
            boundary: BoundaryChoice::NoFlowBottom,
            epsilon: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub dx: f64,
    /// Defaults to `dx`.
    pub dy: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { dx: 0.02, dy: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FormulationChoice {
    #[default]
    Lambda,
    Convex,
    Generalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    /// `ldd`, `lfv`, `picard` or `newton`.
    pub kind: String,
    /// Stabilization `L` on Ω₁, and on Ω₂ unless `l2` is given.
    pub l: f64,
    pub l2: Option<f64>,
    pub formulation: FormulationChoice,
    pub lambda: f64,
    pub eta: f64,
    /// `M` of the generalized formulation.
    pub scale: f64,
}

impl Default for SchemeSection {
    fn default() -> Self {
        Self {
            kind: "ldd".into(),
            l: 0.25,
            l2: None,
            formulation: FormulationChoice::Lambda,
            lambda: 4.0,
            eta: 0.5,
            scale: 1.0,
        }
    }
}

impl SchemeSection {
    pub fn scheme(&self) -> Result<SchemeKind> {
        self.kind
            .parse()
            .map_err(|e: Error| config_error(e.to_string()))
    }

    pub fn formulation(&self) -> InterfaceFormulation {
        match self.formulation {
            FormulationChoice::Lambda => InterfaceFormulation::Lambda {
                lambda: self.lambda,
            },
            FormulationChoice::Convex => InterfaceFormulation::Convex { eta: self.eta },
            FormulationChoice::Generalized => InterfaceFormulation::Generalized {
                scale: self.scale,
                eta: self.eta,
            },
        }
    }

    pub fn params(&self) -> SchemeParams {
        SchemeParams {
            stabilization: [self.l, self.l2.unwrap_or(self.l)],
            formulation: self.formulation(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GmresSection {
    pub restart: usize,
    pub tolerance: f64,
    pub max_iterations: Option<usize>,
    /// Subdomain solves only; whole-domain solves always precondition.
    pub jacobi: bool,
}

impl Default for GmresSection {
    fn default() -> Self {
        let d = GmresOptions::default();
        Self {
            restart: d.restart,
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            jacobi: d.jacobi,
        }
    }
}

impl GmresSection {
    pub fn options(&self) -> GmresOptions {
        GmresOptions {
            restart: self.restart,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            jacobi: self.jacobi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InterfaceStartChoice {
    #[default]
    Reinitialize,
    CarryForward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub t_start: f64,
    pub t_end: f64,
    pub tau: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub divergence_factor: f64,
    /// Constant starting iterate of every step; the previous time level when absent.
    pub initial_guess: Option<f64>,
    pub interface_start: InterfaceStartChoice,
    /// Horizontal line of the profile output.
    pub profile_y: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let d = RunConfig::default();
        Self {
            t_start: d.t_start,
            t_end: d.t_end,
            tau: d.tau,
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            divergence_factor: d.divergence_factor,
            initial_guess: None,
            interface_start: InterfaceStartChoice::Reinitialize,
            profile_y: 0.5,
        }
    }
}

/// How a sweep point reaches its snapshot step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WindowStart {
    /// Exact solution at `snapshot - τ` when the case has one, otherwise a run from `t_start`.
    #[default]
    Auto,
    Exact,
    Transient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Axes default to the single value of the corresponding scheme, run or grid setting.
    pub lambda: Vec<f64>,
    pub l: Vec<f64>,
    pub tau: Vec<f64>,
    pub dx: Vec<f64>,
    /// End time of the evaluated step.
    pub snapshot: f64,
    pub start: WindowStart,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            lambda: Vec::new(),
            l: Vec::new(),
            tau: Vec::new(),
            dx: Vec::new(),
            snapshot: 0.2,
            start: WindowStart::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    pub schemes: Vec<String>,
    /// Overrides `scheme.l` for the whole-domain L-scheme.
    pub lfv_l: Option<f64>,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            schemes: vec!["ldd".into(), "lfv".into()],
            lfv_l: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauBoundSection {
    pub lipschitz_saturation: f64,
    pub lipschitz_rel_perm: f64,
    pub mobility_lower: f64,
    pub gradient_bound: f64,
}

impl Default for TauBoundSection {
    fn default() -> Self {
        Self {
            lipschitz_saturation: 1.0,
            lipschitz_rel_perm: 1.0,
            mobility_lower: 0.5,
            gradient_bound: 1.0,
        }
    }
}

impl TauBoundSection {
    pub fn bounds(&self) -> Result<MaterialBounds> {
        MaterialBounds::new(
            self.lipschitz_saturation,
            self.lipschitz_rel_perm,
            self.mobility_lower,
            self.gradient_bound,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub dump_matrices: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            dump_matrices: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub case: CaseSection,
    pub grid: GridSection,
    pub scheme: SchemeSection,
    pub gmres: GmresSection,
    pub run: RunSection,
    pub sweep: SweepSection,
    pub compare: CompareSection,
    pub tau_bound: TauBoundSection,
    pub output: OutputSection,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_error(e.to_string()))
    }

    /// The case on a grid of spacing `dx`.
    pub fn problem_with_dx(&self, dx: f64) -> Result<FlowProblem> {
        let dy = self.grid.dy.unwrap_or(dx);
        match self.case.kind {
            CaseKind::Manufactured => {
                let boundary = match self.case.boundary {
                    BoundaryChoice::NoFlowBottom => ManufacturedBoundary::NoFlowBottom,
                    BoundaryChoice::Dirichlet => ManufacturedBoundary::Dirichlet,
                };
                manufactured_problem_with(dx, dy, boundary)
            }
            CaseKind::Realistic => RealisticCase {
                epsilon: self.case.epsilon,
                ..Default::default()
            }
            .problem(dx, dy),
        }
    }

    pub fn problem(&self) -> Result<FlowProblem> {
        self.problem_with_dx(self.grid.dx)
    }

    /// The run settings; matrices go to `dump_dir` when dumping is on.
    pub fn run_config(&self) -> Result<RunConfig> {
        let r = &self.run;
        let cfg = RunConfig {
            scheme: self.scheme.scheme()?,
            params: self.scheme.params(),
            tolerance: r.tolerance,
            max_iterations: r.max_iterations,
            divergence_factor: r.divergence_factor,
            t_start: r.t_start,
            t_end: r.t_end,
            tau: r.tau,
            initial_guess: r
                .initial_guess
                .map_or(InitialGuess::PreviousTime, InitialGuess::Constant),
            interface_start: match r.interface_start {
                InterfaceStartChoice::Reinitialize => InterfaceStart::Reinitialize,
                InterfaceStartChoice::CarryForward => InterfaceStart::CarryForward,
            },
            gmres: self.gmres.options(),
            dump_dir: self
                .output
                .dump_matrices
                .then(|| self.output.dir.join("matrices")),
        };
        Ok(cfg)
    }

    pub fn sweep_axes(&self) -> SweepAxes {
        let s = &self.sweep;
        let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        SweepAxes {
            lambda: or(&s.lambda, self.scheme.lambda),
            l: or(&s.l, self.scheme.l),
            tau: or(&s.tau, self.run.tau),
            dx: or(&s.dx, self.grid.dx),
        }
    }

    pub fn compare_schemes(&self) -> Result<Vec<SchemeKind>> {
        let kinds = self
            .compare
            .schemes
            .iter()
            .map(|s| {
                s.parse::<SchemeKind>()
                    .map_err(|e| config_error(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        if kinds.len() < 2 {
            return Err(config_error(format!(
                "compare needs at least two schemes, got {}",
                kinds.len()
            )));
        }
        Ok(kinds)
    }

    /// Checks every section against the module preconditions.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::Config(_) => e,
            other => config_error(other.to_string()),
        };
        self.problem().map_err(wrap)?;
        self.run_config()?.validate().map_err(wrap)?;
        if !(self.run.profile_y >= 0.0 && self.run.profile_y <= 1.0) {
            return Err(config_error(format!(
                "profile_y must lie in [0, 1], got {}",
                self.run.profile_y
            )));
        }
        if self.case.kind == CaseKind::Realistic
            && !(self.case.epsilon > 0.0 && self.case.epsilon < 1.0)
        {
            return Err(config_error(format!(
                "epsilon must lie in (0, 1), got {}",
                self.case.epsilon
            )));
        }
        let axes = self.sweep_axes();
        for (name, values) in [
            ("lambda", &axes.lambda),
            ("l", &axes.l),
            ("tau", &axes.tau),
            ("dx", &axes.dx),
        ] {
            if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(config_error(format!(
                    "sweep axis {name} must be positive, got {v}"
                )));
            }
        }
        if !(self.sweep.snapshot > self.run.t_start) {
            return Err(config_error(format!(
                "sweep snapshot {} must lie after t_start {}",
                self.sweep.snapshot, self.run.t_start
            )));
        }
        if let Some(l) = self.compare.lfv_l {
            if !(l >= 0.0) {
                return Err(config_error(format!("lfv_l must be non-negative, got {l}")));
            }
        }
        for s in &self.compare.schemes {
            s.parse::<SchemeKind>().map_err(wrap)?;
        }
        self.tau_bound.bounds().map_err(wrap)?;
        Ok(())
    }
}

/// The four sweep axes with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub lambda: Vec<f64>,
    pub l: Vec<f64>,
    pub tau: Vec<f64>,
    pub dx: Vec<f64>,
}

impl SweepAxes {
    pub fn len(&self) -> usize {
        self.lambda.len() * self.l.len() * self.tau.len() * self.dx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        let c = ConfigFile::parse("").unwrap();
        assert_eq!(c, ConfigFile::default());
        c.validate().unwrap();
        let r = c.run_config().unwrap();
        assert_eq!(r.params, SchemeParams::default());
        assert_eq!(r.scheme, SchemeKind::Ldd);
    }

    #[test]
    fn sections_are_read() {
        let c = ConfigFile::parse(
            r#"
            [case]
            kind = "realistic"
            epsilon = 0.05
            [grid]
            dx = 0.1
            [scheme]
            kind = "lfv"
            l = 0.5
            [run]
            tau = 0.001
            initial_guess = -5.0
            [sweep]
            lambda = [0.5, 4.0, 40.0]
            [output]
            dump_matrices = true
            "#,
        )
        .unwrap();
        c.validate().unwrap();
        let r = c.run_config().unwrap();
        assert_eq!(r.scheme, SchemeKind::Lfv);
        assert_eq!(r.params.stabilization, [0.5, 0.5]);
        assert_eq!(r.initial_guess, InitialGuess::Constant(-5.0));
        assert_eq!(r.dump_dir, Some(PathBuf::from("out/matrices")));
        let axes = c.sweep_axes();
        assert_eq!(axes.len(), 3);
        assert_eq!(axes.tau, vec![0.001]);
        assert_eq!(c.problem().unwrap().grid.ny, 10);
    }

    #[test]
    fn bad_values_are_config_errors() {
        for text in [
            "[scheme]\nkind = \"jacobi\"",
            "[scheme]\nl = 0.0",
            "[run]\ntau = -1.0",
            "[grid]\ndx = 0.3",
            "[sweep]\nlambda = [1.0, -2.0]",
            "[compare]\nschemes = [\"gauss\"]",
            "[tau_bound]\nmobility_lower = 0.0",
            "[nonsense]\nx = 1",
            "[run]\nunknown_key = 1",
        ] {
            let err = ConfigFile::parse(text).and_then(|c| c.validate());
            assert!(matches!(err, Err(Error::Config(_))), "{text}: {err:?}");
        }
    }

    #[test]
    fn compare_needs_two() {
        let mut c = ConfigFile::default();
        c.compare.schemes = vec!["ldd".into()];
        assert!(c.compare_schemes().is_err());
    }

    #[test]
    fn round_trip() {
        let mut c = ConfigFile::default();
        c.scheme.l2 = Some(0.3);
        c.sweep.lambda = vec![1.0, 2.0];
        c.run.initial_guess = Some(-5.0);
        let back = ConfigFile::parse(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
