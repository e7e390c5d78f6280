//! Per-iteration error measures and rate extraction.

use crate::assembly::{flux_field, InterfaceState, RobinCoupling};
use crate::error::{invalid, Result};
use crate::grid::{linf_norm, CellField, Subdomain};
use crate::linalg::GmresStats;
use crate::problem::FlowProblem;

/// Cells whose exact pressure is smaller than this are left out of relative errors.
pub const RELATIVE_ERROR_GUARD: f64 = 1e-12;

/// Error measures of one inner iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    /// 1-based.
    pub iteration: usize,
    /// `‖p^i - p^{i-1}‖` in L²(Ω).
    pub l2_increment: f64,
    pub linf_increment: f64,
    /// `‖p_Γ,1 - p_Γ,2‖` in L²(Γ).
    pub pressure_jump: f64,
    /// `‖F₁·n₁ + F₂·n₂‖` in L²(Γ).
    pub flux_jump: f64,
    /// L²(Γ) change of the Robin data, both sides.
    pub g_increment: f64,
    /// One entry per linear solve of the iteration.
    pub gmres: Vec<GmresStats>,
}

impl IterationReport {
    pub fn gmres_iterations(&self) -> usize {
        self.gmres.iter().map(|s| s.iterations).sum()
    }

    pub fn is_finite(&self) -> bool {
        [
            self.l2_increment,
            self.linf_increment,
            self.pressure_jump,
            self.flux_jump,
            self.g_increment,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Interface data entering [`error_metrics`].
#[derive(Debug, Clone, Copy)]
pub struct InterfaceMetrics<'a> {
    pub state: &'a InterfaceState,
    pub coupling: &'a RobinCoupling,
    /// Robin data of the next iteration, for the `g` increment.
    pub next: Option<&'a InterfaceState>,
}

/// Increments between two iterates plus interface jumps.
///
/// Without interface data the jumps and `g` increment are reported as zero,
/// which is what monolithic schemes satisfy by construction.
pub fn error_metrics(
    problem: &FlowProblem,
    iteration: usize,
    p_current: &CellField,
    p_previous: &CellField,
    interface: Option<InterfaceMetrics<'_>>,
    gmres: Vec<GmresStats>,
) -> Result<IterationReport> {
    let grid = &problem.grid;
    let diff = p_current.difference(p_previous);
    let l2_increment = grid.l2_norm(&diff)?;
    let linf_increment = grid.linf_norm(&diff)?;
    let (pressure_jump, flux_jump, g_increment) = match interface {
        Some(m) => {
            let pj = grid.l2_interface_norm(&m.state.pressure_jump())?;
            let fj = grid.l2_interface_norm(&m.state.flux_jump(m.coupling))?;
            let gi = match m.next {
                Some(next) => {
                    let a = m.coupling.flux_scale;
                    let mut sq = 0.0;
                    for side in 0..2 {
                        let d: Vec<f64> = next.g[side]
                            .iter()
                            .zip(&m.state.g[side])
                            .map(|(n, o)| a * (n - o))
                            .collect();
                        sq += grid.l2_interface_norm(&d)?.powi(2);
                    }
                    sq.sqrt()
                }
                None => 0.0,
            };
            (pj, fj, gi)
        }
        None => (0.0, 0.0, 0.0),
    };
    Ok(IterationReport {
        iteration,
        l2_increment,
        linf_increment,
        pressure_jump,
        flux_jump,
        g_increment,
        gmres,
    })
}

/// Arithmetic and geometric mean of successive ratios `e_{i+1}/e_i`.
///
/// Ratios stop at the first zero entry; the geometric mean uses at most
/// the first 20 ratios.
pub fn contraction_rate(series: &[f64]) -> Result<(f64, f64)> {
    if series.len() < 2 {
        return Err(invalid("contraction rate needs at least two entries"));
    }
    if series.iter().any(|v| !(*v >= 0.0)) {
        return Err(invalid("contraction rate needs non-negative entries"));
    }
    let mut ratios = Vec::with_capacity(series.len() - 1);
    for w in series.windows(2) {
        if w[0] == 0.0 {
            break;
        }
        ratios.push(w[1] / w[0]);
    }
    if ratios.is_empty() {
        return Err(invalid("contraction rate of a series starting at zero"));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let head = &ratios[..ratios.len().min(20)];
    let geometric = if head.contains(&0.0) {
        0.0
    } else {
        (head.iter().map(|r| r.ln()).sum::<f64>() / head.len() as f64).exp()
    };
    Ok((mean, geometric))
}

/// `max |p_exact - p| / |p_exact|` over cells, or `None` without an exact solution.
pub fn max_relative_error(problem: &FlowProblem, p: &CellField, t: f64) -> Result<Option<f64>> {
    let Some(exact) = &problem.exact else {
        return Ok(None);
    };
    let grid = &problem.grid;
    grid.check_field(p)?;
    let mut errors = Vec::with_capacity(grid.total_cells());
    for sub in Subdomain::BOTH {
        for (c, &v) in p.part(sub).iter().enumerate() {
            let (x, y) = grid.cell_center(sub, c);
            let e = exact(sub, x, y, t);
            if e.abs() >= RELATIVE_ERROR_GUARD {
                errors.push((e - v) / e);
            }
        }
    }
    Ok(Some(linf_norm(errors)))
}

/// One point of the mid-line profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub x: f64,
    pub p_num: f64,
    /// NaN without an exact solution.
    pub p_exact: f64,
    /// NaN where the exact pressure is below the guard.
    pub rel_err: f64,
}

/// Pressure along the horizontal line `y`, interpolated between cell rows.
pub fn profile(problem: &FlowProblem, p: &CellField, y: f64, t: f64) -> Result<Vec<ProfilePoint>> {
    let grid = &problem.grid;
    grid.check_field(p)?;
    if !(grid.y_min..=grid.y_max).contains(&y) {
        return Err(invalid(format!("profile line y = {y} outside the domain")));
    }
    // row coordinate s so that cell row j sits at s = j
    let s = ((y - grid.y_min) / grid.dy - 0.5).clamp(0.0, (grid.ny - 1) as f64);
    let j0 = (s.floor() as usize).min(grid.ny - 1);
    let j1 = (j0 + 1).min(grid.ny - 1);
    let w = s - j0 as f64;
    let mut out = Vec::new();
    for sub in Subdomain::BOTH {
        let values = p.part(sub);
        for i in 0..grid.nx(sub) {
            let a = values[grid.cell_index(sub, i, j0)];
            let b = values[grid.cell_index(sub, i, j1)];
            let (x, _) = grid.cell_center(sub, grid.cell_index(sub, i, j0));
            let p_num = (1.0 - w) * a + w * b;
            let p_exact = problem.exact.as_ref().map_or(f64::NAN, |f| f(sub, x, y, t));
            let rel_err = if p_exact.abs() >= RELATIVE_ERROR_GUARD {
                ((p_exact - p_num) / p_exact).abs()
            } else {
                f64::NAN
            };
            out.push(ProfilePoint {
                x,
                p_num,
                p_exact,
                rel_err,
            });
        }
    }
    Ok(out)
}

/// Global water balance of one backward Euler step.
///
/// `Σ V(θ(p) - θ(p_old)) + τ Σ_boundary F·n |e| - τ Σ V f`, with fluxes
/// evaluated at `p`. Interior fluxes cancel, so a converged monolithic step
/// makes this vanish up to the solver tolerance.
pub fn mass_balance_defect(
    problem: &FlowProblem,
    p: &CellField,
    p_old: &CellField,
    tau: f64,
    t: f64,
) -> Result<f64> {
    let grid = &problem.grid;
    grid.check_field(p_old)?;
    let fluxes = flux_field(problem, p, t)?;
    let volume = grid.cell_volume();
    let mut total = 0.0;
    for sub in Subdomain::BOTH {
        let model = problem.material(sub);
        for (c, (&v, &o)) in p.part(sub).iter().zip(p_old.part(sub)).enumerate() {
            let (x, y) = grid.cell_center(sub, c);
            total += volume
                * (model.storage(v) - model.storage(o) - tau * problem.source_at(sub, x, y, t));
        }
        for (face, q) in &fluxes.boundary[sub.index()] {
            total += tau * q * face.length;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::manufactured_problem;
    use approx::assert_relative_eq;

    #[test]
    fn rates_by_hand() {
        let (m, g) = contraction_rate(&[1.0, 0.5, 0.25]).unwrap();
        assert_relative_eq!(m, 0.5);
        assert_relative_eq!(g, 0.5);
        assert_eq!(contraction_rate(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 1.0));
        let series: Vec<f64> = (0..21).map(|k| 10f64.powi(-k)).collect();
        assert_relative_eq!(
            contraction_rate(&series).unwrap().1,
            0.1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rates_truncate_and_reject() {
        let (m, g) = contraction_rate(&[1.0, 0.5, 0.0, 0.0, 3.0]).unwrap();
        assert_relative_eq!(m, 0.25);
        assert_eq!(g, 0.0);
        assert!(contraction_rate(&[1.0]).is_err());
        assert!(contraction_rate(&[0.0, 1.0]).is_err());
        assert!(contraction_rate(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn geometric_uses_first_twenty() {
        let mut s = vec![1.0];
        for k in 0..30 {
            let r = if k < 20 { 0.5 } else { 0.9 };
            s.push(s[k] * r);
        }
        assert_relative_eq!(contraction_rate(&s).unwrap().1, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn identical_iterates_have_zero_metrics() {
        let prob = manufactured_problem(0.25, 0.25).unwrap();
        let p = prob.grid.sample(|_, x, y| x + y);
        let state = InterfaceState {
            g: [vec![0.4; 4], vec![-0.6; 4]],
            traces: [vec![0.1; 4], vec![0.1; 4]],
        };
        let coupling = crate::assembly::InterfaceFormulation::Lambda { lambda: 1.0 }.coupling();
        let r = error_metrics(
            &prob,
            1,
            &p,
            &p,
            Some(InterfaceMetrics {
                state: &state,
                coupling: &coupling,
                next: Some(&state),
            }),
            vec![],
        )
        .unwrap();
        assert_eq!(
            (
                r.l2_increment,
                r.linf_increment,
                r.pressure_jump,
                r.flux_jump,
                r.g_increment
            ),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn pressure_jump_by_hand() {
        let prob = manufactured_problem(0.5, 0.5).unwrap();
        let state = InterfaceState {
            g: [vec![0.0; 2], vec![0.0; 2]],
            traces: [vec![1.0, 2.0], vec![0.0, 2.0]],
        };
        let c = crate::assembly::InterfaceFormulation::Lambda { lambda: 1.0 }.coupling();
        let p = CellField::constant(&prob.grid, 0.0);
        let m = InterfaceMetrics {
            state: &state,
            coupling: &c,
            next: None,
        };
        let r = error_metrics(&prob, 1, &p, &p, Some(m), vec![]).unwrap();
        assert_relative_eq!(r.pressure_jump, (1.0f64 * 0.5).sqrt());
    }

    #[test]
    fn exact_field_profile() {
        let prob = manufactured_problem(0.1, 0.1).unwrap();
        let t = 0.3;
        let p = prob
            .grid
            .sample(|sub, x, y| crate::cases::exact_pressure(sub, x, y, t));
        let err = max_relative_error(&prob, &p, t).unwrap().unwrap();
        assert_eq!(err, 0.0);
        let prof = profile(&prob, &p, 0.5, t).unwrap();
        assert_eq!(prof.len(), 20);
        // y = 0.5 lies between rows; linear interpolation of y² is off by dy²/4
        for pt in prof {
            assert!(pt.rel_err < 0.01);
            assert!((pt.p_num - pt.p_exact).abs() <= (1.0 + t * t) * 0.0025 + 1e-12);
        }
    }
}
