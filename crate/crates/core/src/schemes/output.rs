//! CSV streams of a run.
//!
//! * iteration log: `step,time,iter,l2_inc,linf_inc,p_jump,flux_jump,g_inc,gmres_iters`
//! * step summary: `step,time,inner_iters,converged`
//! * profile: `x,p_num,p_exact,rel_err`

use std::io::Write;

use crate::error::Result;

use super::metrics::ProfilePoint;
use super::transient::TransientReport;

pub fn write_iteration_log<W: Write>(report: &TransientReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "step",
        "time",
        "iter",
        "l2_inc",
        "linf_inc",
        "p_jump",
        "flux_jump",
        "g_inc",
        "gmres_iters",
    ])?;
    for s in &report.steps {
        for r in &s.iterations {
            w.write_record(&[
                s.step.to_string(),
                fmt(s.time),
                r.iteration.to_string(),
                fmt(r.l2_increment),
                fmt(r.linf_increment),
                fmt(r.pressure_jump),
                fmt(r.flux_jump),
                fmt(r.g_increment),
                r.gmres_iterations().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_step_summary<W: Write>(report: &TransientReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "time", "inner_iters", "converged"])?;
    for s in &report.steps {
        w.write_record(&[
            s.step.to_string(),
            fmt(s.time),
            s.iterations.len().to_string(),
            s.converged().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile<W: Write>(points: &[ProfilePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "p_num", "p_exact", "rel_err"])?;
    for p in points {
        w.write_record(&[fmt(p.x), fmt(p.p_num), fmt(p.p_exact), fmt(p.rel_err)])?;
    }
    w.flush()?;
    Ok(())
}

/// Round-trippable and stable across platforms.
pub(crate) fn fmt(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::manufactured_problem;
    use crate::schemes::{run_transient, RunConfig};

    #[test]
    fn headers_and_rows() {
        let prob = manufactured_problem(0.5, 0.5).unwrap();
        let cfg = RunConfig {
            t_end: 0.02,
            tau: 0.01,
            ..Default::default()
        };
        let r = run_transient(&prob, &cfg).unwrap();
        let mut log = Vec::new();
        write_iteration_log(&r, &mut log).unwrap();
        let log = String::from_utf8(log).unwrap();
        let mut lines = log.lines();
        assert_eq!(
            lines.next().unwrap(),
            "step,time,iter,l2_inc,linf_inc,p_jump,flux_jump,g_inc,gmres_iters"
        );
        let n_iter: usize = r.steps.iter().map(|s| s.iterations.len()).sum();
        assert_eq!(lines.count(), n_iter);

        let mut sum = Vec::new();
        write_step_summary(&r, &mut sum).unwrap();
        let sum = String::from_utf8(sum).unwrap();
        assert!(sum.starts_with("step,time,inner_iters,converged\n1,1e-2,"));
        assert_eq!(sum.lines().count(), 3);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.25e-7, 3.0, 1e300] {
            assert_eq!(fmt(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt(f64::NAN), "NaN");
    }
}
