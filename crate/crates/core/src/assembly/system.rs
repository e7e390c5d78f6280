//! Linear systems of one inner iteration.
//!
//! Every cell balance is integrated over the cell and multiplied through by
//! the time step, so a row reads
//!
//! ```text
//! V·a·p_c + τ Σ_faces Q_out = V·(rhs terms)
//! ```
//!
//! with `Q_out` the total TPFA flux leaving the cell through a face.

use crate::error::{invalid, Error, Result};
use crate::grid::{CellField, DecomposedGrid, Subdomain};
use crate::linalg::TripletMatrix;
use crate::problem::{BoundaryCondition, FlowProblem};

use super::interface::RobinCoupling;
use super::tpfa::{face_geometry, half_transmissibility, harmonic, interior_faces, FaceDirection};

/// Time level being solved for.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub problem: &'a FlowProblem,
    pub tau: f64,
    /// `t^n`, where sources and boundary data are evaluated.
    pub time: f64,
}

/// Unknowns of a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Subdomain(Subdomain),
    /// Ω₁ cells, then Ω₂ cells.
    Monolithic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unknown {
    Pressure,
    /// Newton increment `δp`.
    Increment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainSystem {
    pub matrix: TripletMatrix,
    pub rhs: Vec<f64>,
    pub ordering: Ordering,
    pub unknown: Unknown,
}

impl SubdomainSystem {
    fn new(n: usize, ordering: Ordering, unknown: Unknown) -> Self {
        Self {
            matrix: TripletMatrix::with_capacity(n, n, 5 * n),
            rhs: vec![0.0; n],
            ordering,
            unknown,
        }
    }

    pub fn dimension(&self) -> usize {
        self.rhs.len()
    }
}

/// The monolithic linearizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonolithicKind {
    /// L-scheme on the whole domain.
    LScheme,
    /// Modified Picard: `S'(p^{i-1})` as accumulation coefficient.
    Picard,
    /// Newton on the discrete residual, solving for the increment.
    Newton,
}

struct CellData {
    mobility: Vec<f64>,
    mobility_derivative: Vec<f64>,
    elevation: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl CellData {
    fn new(problem: &FlowProblem, sub: Subdomain, p: &[f64], derivatives: bool) -> Self {
        let grid = &problem.grid;
        let model = problem.material(sub);
        let (x, y): (Vec<f64>, Vec<f64>) = (0..p.len()).map(|c| grid.cell_center(sub, c)).unzip();
        Self {
            mobility: p.iter().map(|&v| model.mobility(v)).collect(),
            mobility_derivative: if derivatives {
                p.iter().map(|&v| model.mobility_derivative(v)).collect()
            } else {
                Vec::new()
            },
            elevation: x.iter().map(|&xc| problem.elevation(xc)).collect(),
            x,
            y,
        }
    }
}

fn check_len(grid: &DecomposedGrid, sub: Subdomain, v: &[f64]) -> Result<()> {
    let n = grid.cell_count(sub);
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    Ok(())
}

/// Frozen-mobility diffusion inside one subdomain, written at `offset`.
fn add_diffusion(
    sys: &mut SubdomainSystem,
    grid: &DecomposedGrid,
    sub: Subdomain,
    cells: &CellData,
    tau: f64,
    offset: usize,
) {
    for face in interior_faces(grid, sub) {
        let (length, half) = face_geometry(grid, face.direction);
        let t = harmonic(
            half_transmissibility(cells.mobility[face.left], length, half),
            half_transmissibility(cells.mobility[face.right], length, half),
        );
        let (a, b) = (offset + face.left, offset + face.right);
        let m = &mut sys.matrix;
        m.push(a, a, tau * t);
        m.push(b, b, tau * t);
        m.push(a, b, -tau * t);
        m.push(b, a, -tau * t);
        let dz = cells.elevation[face.left] - cells.elevation[face.right];
        sys.rhs[a] -= tau * t * dz;
        sys.rhs[b] += tau * t * dz;
    }
}

/// Adds exterior boundary contributions of one subdomain.
///
/// Dirichlet faces use the half-cell transmissibility to the face value;
/// Neumann data is an inflow density and only enters the right-hand side.
pub fn apply_bc(
    sys: &mut SubdomainSystem,
    ctx: &StepContext<'_>,
    sub: Subdomain,
    p_frozen: &[f64],
    offset: usize,
) -> Result<()> {
    let problem = ctx.problem;
    let grid = &problem.grid;
    check_len(grid, sub, p_frozen)?;
    let model = problem.material(sub);
    for face in grid.boundary_faces(sub) {
        let row = offset + face.cell;
        match problem.boundary.evaluate(&face, ctx.time)? {
            BoundaryCondition::Dirichlet(pb) => {
                let tb = half_transmissibility(
                    model.mobility(p_frozen[face.cell]),
                    face.length,
                    face.half_distance,
                );
                let zc = problem.elevation(grid.cell_center(sub, face.cell).0);
                sys.matrix.push(row, row, ctx.tau * tb);
                sys.rhs[row] += ctx.tau * tb * (pb + problem.elevation(face.x) - zc);
            }
            BoundaryCondition::Neumann(q) => {
                sys.rhs[row] += ctx.tau * q * face.length;
            }
        }
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// L-scheme system of one subdomain with the Robin closure on the interface.
///
/// Mobilities and the saturation residual are frozen at `p_iter_prev`;
/// `g` holds the Robin data of this side.
pub fn assemble_ldd(
    ctx: &StepContext<'_>,
    sub: Subdomain,
    p_iter_prev: &[f64],
    p_time_prev: &[f64],
    g: &[f64],
    coupling: &RobinCoupling,
    stabilization: f64,
) -> Result<SubdomainSystem> {
    check_positive("stabilization L", stabilization)?;
    check_positive("Robin pressure weight", coupling.pressure_weight)?;
    let problem = ctx.problem;
    let grid = &problem.grid;
    check_len(grid, sub, p_iter_prev)?;
    check_len(grid, sub, p_time_prev)?;
    if g.len() != grid.ny {
        return Err(Error::DimensionMismatch {
            expected: grid.ny,
            found: g.len(),
        });
    }
    let n = grid.cell_count(sub);
    let model = problem.material(sub);
    let volume = grid.cell_volume();
    let cells = CellData::new(problem, sub, p_iter_prev, false);
    let mut sys = SubdomainSystem::new(n, Ordering::Subdomain(sub), Unknown::Pressure);

    for c in 0..n {
        sys.matrix.push(c, c, volume * stabilization);
        let ds = model.storage(p_iter_prev[c]) - model.storage(p_time_prev[c]);
        let f = problem.source_at(sub, cells.x[c], cells.y[c], ctx.time);
        sys.rhs[c] += volume * (stabilization * p_iter_prev[c] - ds + ctx.tau * f);
    }
    add_diffusion(&mut sys, grid, sub, &cells, ctx.tau, 0);
    apply_bc(&mut sys, ctx, sub, p_iter_prev, 0)?;

    // Robin closure with p_Γ eliminated:
    // F·n = k (a g + b p_c - b Δz) / (k + b), k = mobility / half
    let (length, half) = face_geometry(grid, FaceDirection::X);
    let z_gamma = problem.elevation(grid.x_split);
    let (a, b) = (coupling.flux_scale, coupling.pressure_weight);
    for (j, &gj) in g.iter().enumerate() {
        let c = grid.interface_cell(sub, j);
        let k = cells.mobility[c] / half;
        let dz = z_gamma - cells.elevation[c];
        let w = k / (k + b);
        sys.matrix.push(c, c, ctx.tau * length * w * b);
        sys.rhs[c] -= ctx.tau * length * w * (a * gj - b * dz);
    }
    Ok(sys)
}

/// Whole-domain system of one monolithic inner iteration.
///
/// The interface is an ordinary interior face with the harmonic mean of the
/// two materials' half transmissibilities. `stabilization` holds `L₁, L₂`
/// and is only read by the L-scheme.
pub fn assemble_monolithic(
    kind: MonolithicKind,
    ctx: &StepContext<'_>,
    p_iter_prev: &CellField,
    p_time_prev: &CellField,
    stabilization: [f64; 2],
) -> Result<SubdomainSystem> {
    let problem = ctx.problem;
    let grid = &problem.grid;
    grid.check_field(p_iter_prev)?;
    grid.check_field(p_time_prev)?;
    if kind == MonolithicKind::LScheme {
        for l in stabilization {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(invalid(format!(
                    "stabilization L must be non-negative, got {l}"
                )));
            }
        }
    }
    if kind == MonolithicKind::Newton {
        return assemble_newton(ctx, p_iter_prev, p_time_prev);
    }

    let n = grid.total_cells();
    let volume = grid.cell_volume();
    let mut sys = SubdomainSystem::new(n, Ordering::Monolithic, Unknown::Pressure);
    let mut cells_by_sub = Vec::with_capacity(2);
    for sub in Subdomain::BOTH {
        let offset = grid.monolithic_offset(sub);
        let model = problem.material(sub);
        let prev = p_iter_prev.part(sub);
        let old = p_time_prev.part(sub);
        let cells = CellData::new(problem, sub, prev, false);
        for c in 0..prev.len() {
            let coeff = match kind {
                MonolithicKind::LScheme => stabilization[sub.index()],
                _ => model.storage_derivative(prev[c]),
            };
            let row = offset + c;
            sys.matrix.push(row, row, volume * coeff);
            let ds = model.storage(prev[c]) - model.storage(old[c]);
            let f = problem.source_at(sub, cells.x[c], cells.y[c], ctx.time);
            sys.rhs[row] += volume * (coeff * prev[c] - ds + ctx.tau * f);
        }
        add_diffusion(&mut sys, grid, sub, &cells, ctx.tau, offset);
        apply_bc(&mut sys, ctx, sub, prev, offset)?;
        cells_by_sub.push(cells);
    }

    let (length, half) = face_geometry(grid, FaceDirection::X);
    let off2 = grid.monolithic_offset(Subdomain::Two);
    for j in 0..grid.ny {
        let c1 = grid.interface_cell(Subdomain::One, j);
        let c2 = grid.interface_cell(Subdomain::Two, j);
        let t = harmonic(
            half_transmissibility(cells_by_sub[0].mobility[c1], length, half),
            half_transmissibility(cells_by_sub[1].mobility[c2], length, half),
        );
        let (a, b) = (c1, off2 + c2);
        sys.matrix.push(a, a, ctx.tau * t);
        sys.matrix.push(b, b, ctx.tau * t);
        sys.matrix.push(a, b, -ctx.tau * t);
        sys.matrix.push(b, a, -ctx.tau * t);
        let dz = cells_by_sub[0].elevation[c1] - cells_by_sub[1].elevation[c2];
        sys.rhs[a] -= ctx.tau * t * dz;
        sys.rhs[b] += ctx.tau * t * dz;
    }
    Ok(sys)
}

/// Flux `Q = T(t_a, t_b)·Δψ` through one face and its partial derivatives.
struct FaceLinearization {
    flux: f64,
    d_left: f64,
    d_right: f64,
}

fn linearize_face(
    mob: (f64, f64),
    dmob: (f64, f64),
    geom: (f64, f64),
    dpsi: f64,
) -> FaceLinearization {
    let (length, half) = geom;
    let ta = half_transmissibility(mob.0, length, half);
    let tb = half_transmissibility(mob.1, length, half);
    let t = harmonic(ta, tb);
    let sum = ta + tb;
    let (dt_da, dt_db) = if sum > 0.0 {
        (tb * tb / (sum * sum), ta * ta / (sum * sum))
    } else {
        (0.0, 0.0)
    };
    let scale = length / half;
    FaceLinearization {
        flux: t * dpsi,
        d_left: t + dt_da * scale * dmob.0 * dpsi,
        d_right: -t + dt_db * scale * dmob.1 * dpsi,
    }
}

fn assemble_newton(
    ctx: &StepContext<'_>,
    p_iter_prev: &CellField,
    p_time_prev: &CellField,
) -> Result<SubdomainSystem> {
    let problem = ctx.problem;
    let grid = &problem.grid;
    let tau = ctx.tau;
    let n = grid.total_cells();
    let volume = grid.cell_volume();
    let mut sys = SubdomainSystem::new(n, Ordering::Monolithic, Unknown::Increment);
    // rhs accumulates the residual R; negated at the end
    let couple = |sys: &mut SubdomainSystem, a: usize, b: usize, lin: &FaceLinearization| {
        sys.rhs[a] += tau * lin.flux;
        sys.rhs[b] -= tau * lin.flux;
        sys.matrix.push(a, a, tau * lin.d_left);
        sys.matrix.push(a, b, tau * lin.d_right);
        sys.matrix.push(b, a, -tau * lin.d_left);
        sys.matrix.push(b, b, -tau * lin.d_right);
    };

    let mut cells_by_sub = Vec::with_capacity(2);
    for sub in Subdomain::BOTH {
        let offset = grid.monolithic_offset(sub);
        let model = problem.material(sub);
        let prev = p_iter_prev.part(sub);
        let old = p_time_prev.part(sub);
        let cells = CellData::new(problem, sub, prev, true);
        for c in 0..prev.len() {
            let row = offset + c;
            sys.matrix
                .push(row, row, volume * model.storage_derivative(prev[c]));
            let f = problem.source_at(sub, cells.x[c], cells.y[c], ctx.time);
            sys.rhs[row] += volume * (model.storage(prev[c]) - model.storage(old[c]) - tau * f);
        }
        for face in interior_faces(grid, sub) {
            let (l, r) = (face.left, face.right);
            let dpsi = prev[l] + cells.elevation[l] - prev[r] - cells.elevation[r];
            let lin = linearize_face(
                (cells.mobility[l], cells.mobility[r]),
                (cells.mobility_derivative[l], cells.mobility_derivative[r]),
                face_geometry(grid, face.direction),
                dpsi,
            );
            couple(&mut sys, offset + l, offset + r, &lin);
        }
        for face in grid.boundary_faces(sub) {
            let row = offset + face.cell;
            let c = face.cell;
            match problem.boundary.evaluate(&face, ctx.time)? {
                BoundaryCondition::Dirichlet(pb) => {
                    let tb =
                        half_transmissibility(cells.mobility[c], face.length, face.half_distance);
                    let dpsi = prev[c] + cells.elevation[c] - pb - problem.elevation(face.x);
                    let dtb = half_transmissibility(
                        cells.mobility_derivative[c],
                        face.length,
                        face.half_distance,
                    );
                    sys.rhs[row] += tau * tb * dpsi;
                    sys.matrix.push(row, row, tau * (tb + dtb * dpsi));
                }
                BoundaryCondition::Neumann(q) => {
                    sys.rhs[row] -= tau * q * face.length;
                }
            }
        }
        cells_by_sub.push(cells);
    }

    let geom = face_geometry(grid, FaceDirection::X);
    let off2 = grid.monolithic_offset(Subdomain::Two);
    let (p1, p2) = (
        p_iter_prev.part(Subdomain::One),
        p_iter_prev.part(Subdomain::Two),
    );
    for j in 0..grid.ny {
        let c1 = grid.interface_cell(Subdomain::One, j);
        let c2 = grid.interface_cell(Subdomain::Two, j);
        let (a, b) = (&cells_by_sub[0], &cells_by_sub[1]);
        let dpsi = p1[c1] + a.elevation[c1] - p2[c2] - b.elevation[c2];
        let lin = linearize_face(
            (a.mobility[c1], b.mobility[c2]),
            (a.mobility_derivative[c1], b.mobility_derivative[c2]),
            geom,
            dpsi,
        );
        couple(&mut sys, c1, off2 + c2, &lin);
    }
    sys.rhs.iter_mut().for_each(|r| *r = -*r);
    Ok(sys)
}

/// Cell residual of the backward Euler step at `p`, mobilities taken at `p`.
///
/// Row `c` is `V (θ(p) - θ(p_old)) + τ Σ Q_out - τ V f`; zero at a solution.
pub fn step_residual(
    ctx: &StepContext<'_>,
    p: &CellField,
    p_time_prev: &CellField,
) -> Result<Vec<f64>> {
    let sys = assemble_newton(ctx, p, p_time_prev)?;
    Ok(sys.rhs.iter().map(|r| -r).collect())
}
