//! Run orchestration behind the `ldd` binary: single runs, parameter sweeps,
//! scheme comparisons and the time-step bound.
//!
//! CSV layouts:
//!
//! * sweep: `lambda,l,tau,dx,converged,divergence,iterations,rate_mean,rate_geometric,lambda_opt`
//! * compare curves: `scheme,step,time,iter,l2_inc,linf_inc`
//! * compare summary: `scheme,l,converged,failure_step,divergence,steps,avg_inner_iters,gmres_iters,rate_geometric,seconds_per_iter`

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::config::{ConfigFile, WindowStart};
use crate::constitutive::tau_max;
use crate::error::{DivergenceKind, Error, Result};
use crate::problem::FlowProblem;
use crate::schemes::{
    fmt, profile, run_transient, write_iteration_log, write_profile, write_step_summary, RunConfig,
    SchemeKind, TransientReport,
};

/// Process exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::Constraint(_)
        | Error::Grid(_)
        | Error::Boundary(_) => 2,
        Error::Diverged {
            kind: DivergenceKind::LinearSolve,
            ..
        } => 4,
        Error::Diverged { .. } => 3,
        Error::Breakdown { .. }
        | Error::TooLarge { .. }
        | Error::DimensionMismatch { .. }
        | Error::IndexOutOfRange { .. } => 4,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs the configured case and writes `iteration_log.csv`, `step_summary.csv`,
/// `profile.csv` and `summary.toml` into `out`.
///
/// Divergence is part of the returned report, not an error.
pub fn cmd_run(config: &ConfigFile, out: &Path) -> Result<TransientReport> {
    config.validate()?;
    let problem = config.problem()?;
    let run = config.run_config()?;
    let report = run_transient(&problem, &run)?;

    fs::create_dir_all(out)?;
    write_iteration_log(&report, create(&out.join("iteration_log.csv"))?)?;
    write_step_summary(&report, create(&out.join("step_summary.csv"))?)?;
    let state = &report.final_state;
    let points = profile(&problem, &state.pressure, config.run.profile_y, state.time)?;
    write_profile(&points, create(&out.join("profile.csv"))?)?;
    write_summary(config, &report, create(&out.join("summary.toml"))?)?;
    Ok(report)
}

/// The parsed configuration followed by a `[result]` table.
fn write_summary<W: Write>(config: &ConfigFile, report: &TransientReport, mut w: W) -> Result<()> {
    writeln!(w, "{}", config.to_toml()?)?;
    writeln!(w, "[result]")?;
    writeln!(w, "converged = {}", report.converged())?;
    writeln!(w, "steps = {}", report.steps.len())?;
    if let Some((step, kind)) = report.failure {
        writeln!(w, "failure_step = {step}")?;
        writeln!(w, "divergence = \"{kind}\"")?;
    }
    writeln!(w, "final_time = {:?}", report.final_state.time)?;
    writeln!(
        w,
        "average_inner_iterations = {:?}",
        report.average_inner_iterations()
    )?;
    writeln!(w, "gmres_iterations = {}", report.total_gmres_iterations())?;
    if let Some(e) = report.max_relative_error() {
        writeln!(w, "max_relative_error = {e:?}")?;
    }
    if let Some(e) = report.final_relative_error() {
        writeln!(w, "final_relative_error = {e:?}")?;
    }
    w.flush()?;
    Ok(())
}

/// One point of the Cartesian sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub l: f64,
    pub tau: f64,
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub divergence: Option<DivergenceKind>,
    /// Inner iterations of the evaluated step.
    pub iterations: usize,
    /// Arithmetic and geometric contraction rate of the evaluated step.
    pub rate: Option<(f64, f64)>,
    /// Argmin of the geometric rate over λ among converged rows sharing `(L, τ, Δx)`.
    pub lambda_opt: Option<f64>,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.divergence.is_none()
    }

    pub fn geometric_rate(&self) -> Option<f64> {
        self.rate.map(|r| r.1)
    }
}

/// One row per sweep point, in the order `dx`, `tau`, `l`, `lambda` (outermost first).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "lambda",
            "l",
            "tau",
            "dx",
            "converged",
            "divergence",
            "iterations",
            "rate_mean",
            "rate_geometric",
            "lambda_opt",
        ])?;
        let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
        for r in &self.rows {
            let p = r.point;
            w.write_record(&[
                fmt(p.lambda),
                fmt(p.l),
                fmt(p.tau),
                fmt(p.dx),
                r.converged().to_string(),
                r.divergence.map(|k| k.to_string()).unwrap_or_default(),
                r.iterations.to_string(),
                opt(r.rate.map(|r| r.0)),
                opt(r.rate.map(|r| r.1)),
                opt(r.lambda_opt),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rows sharing `l`, `tau` and `dx`, in λ order.
    pub fn group(&self, l: f64, tau: f64, dx: f64) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.point.l == l && r.point.tau == tau && r.point.dx == dx)
            .collect()
    }
}

pub fn sweep_points(config: &ConfigFile) -> Vec<SweepPoint> {
    let axes = config.sweep_axes();
    let mut points = Vec::with_capacity(axes.len());
    for &dx in &axes.dx {
        for &tau in &axes.tau {
            for &l in &axes.l {
                for &lambda in &axes.lambda {
                    points.push(SweepPoint { lambda, l, tau, dx });
                }
            }
        }
    }
    points
}

/// Problem and run settings that evaluate `point`; the last step ends at the snapshot.
pub fn sweep_point_setup(
    config: &ConfigFile,
    point: SweepPoint,
) -> Result<(FlowProblem, RunConfig)> {
    let mut c = config.clone();
    c.grid.dx = point.dx;
    c.grid.dy = None;
    c.scheme.l = point.l;
    c.scheme.l2 = None;
    c.scheme.lambda = point.lambda;
    c.run.tau = point.tau;
    let problem = c.problem()?;
    let exact = match config.sweep.start {
        WindowStart::Auto => problem.exact.is_some(),
        WindowStart::Exact if problem.exact.is_none() => {
            return Err(Error::Config(
                "an exact window start needs a case with an exact solution".into(),
            ))
        }
        WindowStart::Exact => true,
        WindowStart::Transient => false,
    };
    let snapshot = config.sweep.snapshot;
    c.run.t_start = if exact {
        snapshot - point.tau
    } else {
        config.run.t_start
    };
    c.run.t_end = snapshot;
    if !(c.run.t_start < c.run.t_end) {
        return Err(Error::Config(format!(
            "sweep window [{}, {snapshot}] is empty",
            c.run.t_start
        )));
    }
    let run = c.run_config()?;
    run.validate()?;
    Ok((problem, run))
}

pub fn evaluate_sweep_point(config: &ConfigFile, point: SweepPoint) -> Result<SweepRow> {
    let (problem, run) = sweep_point_setup(config, point)?;
    let report = run_transient(&problem, &run)?;
    let last = report.steps.last();
    let divergence = report.failure.map(|f| f.1);
    Ok(SweepRow {
        point,
        divergence,
        iterations: last.map_or(0, |s| s.iterations.len()),
        rate: match (divergence, last) {
            (None, Some(s)) => s.contraction_rate(),
            _ => None,
        },
        lambda_opt: None,
    })
}

/// Evaluates every point, in parallel on the current rayon pool; row order
/// follows [`sweep_points`] regardless of completion order.
pub fn cmd_sweep(config: &ConfigFile) -> Result<SweepReport> {
    config.validate()?;
    let points = sweep_points(config);
    let mut rows = points
        .par_iter()
        .map(|&p| evaluate_sweep_point(config, p))
        .collect::<Result<Vec<_>>>()?;
    let opts: Vec<Option<f64>> = rows
        .iter()
        .map(|r| {
            let p = r.point;
            rows.iter()
                .filter(|o| o.point.l == p.l && o.point.tau == p.tau && o.point.dx == p.dx)
                .filter_map(|o| o.geometric_rate().map(|g| (g, o.point.lambda)))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, lambda)| lambda)
        })
        .collect();
    for (r, o) in rows.iter_mut().zip(opts) {
        r.lambda_opt = o;
    }
    Ok(SweepReport { rows })
}

/// Writes `sweep.csv` into `out`.
pub fn write_sweep(report: &SweepReport, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    report.write_csv(create(&out.join("sweep.csv"))?)
}

/// One scheme's run within a comparison.
#[derive(Debug, Clone)]
pub struct SchemeRun {
    pub scheme: SchemeKind,
    /// `L` used on both subdomains; ignored by Picard and Newton.
    pub stabilization: f64,
    pub report: TransientReport,
    /// Informational only.
    pub wall_clock: Duration,
}

impl SchemeRun {
    pub fn seconds_per_iteration(&self) -> f64 {
        let n: usize = self.report.steps.iter().map(|s| s.iterations.len()).sum();
        if n == 0 {
            return 0.0;
        }
        self.wall_clock.as_secs_f64() / n as f64
    }

    /// Geometric contraction rate of the last step taken.
    pub fn last_rate(&self) -> Option<f64> {
        self.report
            .steps
            .last()
            .and_then(|s| s.contraction_rate())
            .map(|r| r.1)
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub runs: Vec<SchemeRun>,
}

impl CompareReport {
    pub fn run(&self, scheme: SchemeKind) -> Option<&SchemeRun> {
        self.runs.iter().find(|r| r.scheme == scheme)
    }

    pub fn write_curves<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheme", "step", "time", "iter", "l2_inc", "linf_inc"])?;
        for run in &self.runs {
            for s in &run.report.steps {
                for it in &s.iterations {
                    w.write_record(&[
                        run.scheme.name().to_string(),
                        s.step.to_string(),
                        fmt(s.time),
                        it.iteration.to_string(),
                        fmt(it.l2_increment),
                        fmt(it.linf_increment),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "scheme",
            "l",
            "converged",
            "failure_step",
            "divergence",
            "steps",
            "avg_inner_iters",
            "gmres_iters",
            "rate_geometric",
            "seconds_per_iter",
        ])?;
        for run in &self.runs {
            let r = &run.report;
            w.write_record(&[
                run.scheme.name().to_string(),
                fmt(run.stabilization),
                r.converged().to_string(),
                r.failure.map(|f| f.0.to_string()).unwrap_or_default(),
                r.failure.map(|f| f.1.to_string()).unwrap_or_default(),
                r.steps.len().to_string(),
                fmt(r.average_inner_iterations()),
                r.total_gmres_iterations().to_string(),
                run.last_rate().map(fmt).unwrap_or_default(),
                fmt(run.seconds_per_iteration()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs every listed scheme on the same case, grid and time window, one after
/// another so that timings do not compete.
pub fn cmd_compare(config: &ConfigFile) -> Result<CompareReport> {
    config.validate()?;
    let schemes = config.compare_schemes()?;
    let problem = config.problem()?;
    let base = config.run_config()?;
    let mut runs = Vec::with_capacity(schemes.len());
    for scheme in schemes {
        let l = match (scheme, config.compare.lfv_l) {
            (SchemeKind::Lfv, Some(l)) => l,
            _ => config.scheme.l,
        };
        let mut run = base.clone();
        run.scheme = scheme;
        run.params.stabilization = [l, l];
        let start = Instant::now();
        let report = run_transient(&problem, &run)?;
        runs.push(SchemeRun {
            scheme,
            stabilization: l,
            report,
            wall_clock: start.elapsed(),
        });
    }
    Ok(CompareReport { runs })
}

/// Writes `compare_curves.csv` and `compare_summary.csv` into `out`.
pub fn write_compare(report: &CompareReport, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    report.write_curves(create(&out.join("compare_curves.csv"))?)?;
    report.write_summary(create(&out.join("compare_summary.csv"))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauBoundReport {
    pub tau_max: f64,
    pub tau: f64,
}

impl TauBoundReport {
    pub fn satisfied(&self) -> bool {
        self.tau <= self.tau_max
    }
}

impl fmt::Display for TauBoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.satisfied() {
            write!(f, "τ_max={}, satisfied", self.tau_max)
        } else {
            write!(f, "τ_max={}, not satisfied by τ={}", self.tau_max, self.tau)
        }
    }
}

/// The sufficient time-step bound for the configured material bounds and `L`.
///
/// The smaller of the two subdomain values is reported. Not satisfying it is
/// advisory; a stabilization at or below `L_S/2` is an error.
pub fn cmd_tau_bound(config: &ConfigFile) -> Result<TauBoundReport> {
    let bounds = config.tau_bound.bounds()?;
    let l1 = config.scheme.l;
    let l2 = config.scheme.l2.unwrap_or(l1);
    let tau_max = tau_max(&bounds, l1)?.min(tau_max(&bounds, l2)?);
    Ok(TauBoundReport {
        tau_max,
        tau: config.run.tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ConfigFile {
        let mut c = ConfigFile::default();
        c.grid.dx = 0.25;
        c.run.t_end = 0.02;
        c.run.tau = 0.01;
        c
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Constraint("x".into())), 2);
        let div = |kind| Error::Diverged { step: 1, kind };
        assert_eq!(exit_code(&div(DivergenceKind::Blowup)), 3);
        assert_eq!(exit_code(&div(DivergenceKind::IterationLimit)), 3);
        assert_eq!(exit_code(&div(DivergenceKind::LinearSolve)), 4);
        assert_eq!(exit_code(&Error::Breakdown { residual: 1.0 }), 4);
    }

    #[test]
    fn run_writes_streams() {
        let dir = tempfile::tempdir().unwrap();
        let report = cmd_run(&small(), dir.path()).unwrap();
        assert!(report.converged());
        for f in [
            "iteration_log.csv",
            "step_summary.csv",
            "profile.csv",
            "summary.toml",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let steps = fs::read_to_string(dir.path().join("step_summary.csv")).unwrap();
        assert_eq!(steps.lines().count(), 3);
    }

    #[test]
    fn zero_length_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small();
        c.run.t_end = 0.0;
        let report = cmd_run(&c, dir.path()).unwrap();
        assert!(report.converged() && report.steps.is_empty());
        let log = fs::read_to_string(dir.path().join("iteration_log.csv")).unwrap();
        assert_eq!(log.lines().count(), 1);
    }

    #[test]
    fn summary_echoes_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small();
        c.scheme.lambda = 3.5;
        c.run.initial_guess = Some(-0.5);
        cmd_run(&c, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("summary.toml")).unwrap();
        let mut table: toml::Table = text.parse().unwrap();
        let result = table.remove("result").unwrap();
        assert_eq!(result["converged"].as_bool(), Some(true));
        let echoed: ConfigFile = table.try_into().unwrap();
        assert_eq!(echoed, c);
    }

    #[test]
    fn ldd_with_zero_l_is_rejected_before_running() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small();
        c.scheme.l = 0.0;
        let err = cmd_run(&c, &dir.path().join("never")).unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(!dir.path().join("never").exists());
    }

    #[test]
    fn sweep_order_and_lambda_opt() {
        let mut c = small();
        c.sweep.snapshot = 0.02;
        c.sweep.lambda = vec![0.5, 4.0];
        c.sweep.l = vec![0.25, 0.5];
        let r = cmd_sweep(&c).unwrap();
        let seen: Vec<(f64, f64)> = r.rows.iter().map(|r| (r.point.l, r.point.lambda)).collect();
        assert_eq!(seen, vec![(0.25, 0.5), (0.25, 4.0), (0.5, 0.5), (0.5, 4.0)]);
        for row in &r.rows {
            let group = r.group(row.point.l, row.point.tau, row.point.dx);
            let best = group
                .iter()
                .min_by(|a, b| {
                    a.geometric_rate()
                        .unwrap()
                        .total_cmp(&b.geometric_rate().unwrap())
                })
                .unwrap();
            assert_eq!(row.lambda_opt, Some(best.point.lambda));
        }
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }

    #[test]
    fn single_point_sweep_matches_run() {
        let mut c = small();
        c.sweep.snapshot = 0.02;
        let r = cmd_sweep(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        let mut direct = c.clone();
        direct.run.t_start = 0.01;
        direct.run.t_end = 0.02;
        let dir = tempfile::tempdir().unwrap();
        let report = cmd_run(&direct, dir.path()).unwrap();
        let rate = report.steps.last().unwrap().contraction_rate().unwrap();
        assert_eq!(r.rows[0].rate, Some(rate));
        assert_eq!(r.rows[0].iterations, report.steps[0].iterations.len());
    }

    #[test]
    fn realistic_sweep_needs_transient_window() {
        let mut c = small();
        c.case.kind = crate::config::CaseKind::Realistic;
        c.sweep.start = WindowStart::Exact;
        assert!(matches!(cmd_sweep(&c), Err(Error::Config(_))));
        c.sweep.start = WindowStart::Auto;
        c.sweep.snapshot = 0.02;
        let (_, run) = sweep_point_setup(&c, sweep_points(&c)[0]).unwrap();
        assert_eq!(run.t_start, 0.0);
    }

    #[test]
    fn compare_runs_each_scheme() {
        let mut c = small();
        c.compare.schemes = vec!["ldd".into(), "lfv".into(), "newton".into()];
        c.compare.lfv_l = Some(0.5);
        let r = cmd_compare(&c).unwrap();
        assert_eq!(r.runs.len(), 3);
        assert_eq!(r.run(SchemeKind::Lfv).unwrap().stabilization, 0.5);
        assert!(r.runs.iter().all(|run| run.report.converged()));
        let mut buf = Vec::new();
        r.write_summary(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
        c.compare.schemes.truncate(1);
        assert!(matches!(cmd_compare(&c), Err(Error::Config(_))));
    }

    #[test]
    fn tau_bound_by_hand() {
        let mut c = ConfigFile::default();
        c.scheme.l = 1.0;
        c.run.tau = 0.4;
        let r = cmd_tau_bound(&c).unwrap();
        assert!((r.tau_max - 0.5).abs() < 1e-12);
        assert_eq!(r.to_string(), "τ_max=0.5, satisfied");
        c.run.tau = 0.6;
        let r = cmd_tau_bound(&c).unwrap();
        assert!(!r.satisfied());
        c.scheme.l = 0.5;
        assert!(matches!(cmd_tau_bound(&c), Err(Error::Constraint(_))));
    }
}
