//! Two-point flux approximation on the total potential `ψ = p + z`.

use crate::error::Result;
use crate::grid::{BoundaryFace, CellField, DecomposedGrid, Subdomain};
use crate::problem::{BoundaryCondition, FlowProblem};

/// Orientation of a face normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceDirection {
    X,
    Y,
}

/// `mobility · length / half_distance`.
pub fn half_transmissibility(mobility: f64, length: f64, half_distance: f64) -> f64 {
    mobility * length / half_distance
}

/// Harmonic combination of two half-cell transmissibilities.
pub fn harmonic(t_left: f64, t_right: f64) -> f64 {
    let sum = t_left + t_right;
    if sum > 0.0 {
        t_left * t_right / sum
    } else {
        0.0
    }
}

/// Transmissibility of an interior face between two cells of `grid`.
pub fn face_transmissibility(
    grid: &DecomposedGrid,
    mobility_left: f64,
    mobility_right: f64,
    direction: FaceDirection,
) -> f64 {
    let (length, half) = face_geometry(grid, direction);
    harmonic(
        half_transmissibility(mobility_left, length, half),
        half_transmissibility(mobility_right, length, half),
    )
}

/// Face length and centre-to-face distance.
pub(crate) fn face_geometry(grid: &DecomposedGrid, direction: FaceDirection) -> (f64, f64) {
    match direction {
        FaceDirection::X => (grid.dy, 0.5 * grid.dx),
        FaceDirection::Y => (grid.dx, 0.5 * grid.dy),
    }
}

/// Interior face of one subdomain: `left`/`right` are below/above for y-faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct InteriorFace {
    pub left: usize,
    pub right: usize,
    pub direction: FaceDirection,
}

/// x-faces first (row by row), then y-faces.
pub(crate) fn interior_faces(grid: &DecomposedGrid, sub: Subdomain) -> Vec<InteriorFace> {
    let nx = grid.nx(sub);
    let mut faces = Vec::with_capacity(2 * nx * grid.ny);
    for j in 0..grid.ny {
        for i in 0..nx.saturating_sub(1) {
            faces.push(InteriorFace {
                left: grid.cell_index(sub, i, j),
                right: grid.cell_index(sub, i + 1, j),
                direction: FaceDirection::X,
            });
        }
    }
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..nx {
            faces.push(InteriorFace {
                left: grid.cell_index(sub, i, j),
                right: grid.cell_index(sub, i, j + 1),
                direction: FaceDirection::Y,
            });
        }
    }
    faces
}

/// Flux densities `F·n` on every face of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    /// Per subdomain, in [`interior_faces`] order, oriented along `+x`/`+y`.
    pub interior: [Vec<f64>; 2],
    /// Interface faces by row, oriented along `+x` (the outer normal of Ω₁).
    pub interface: Vec<f64>,
    /// Interface pressure from flux continuity, by row.
    pub interface_pressure: Vec<f64>,
    /// Exterior faces per subdomain with the outward flux density.
    pub boundary: [Vec<(BoundaryFace, f64)>; 2],
}

/// Two-sided interface flux (along `+x`) and the continuous interface pressure.
pub(crate) fn interface_flux(
    grid: &DecomposedGrid,
    problem: &FlowProblem,
    p: &CellField,
    j: usize,
) -> (f64, f64) {
    let (length, half) = face_geometry(grid, FaceDirection::X);
    let c1 = grid.interface_cell(Subdomain::One, j);
    let c2 = grid.interface_cell(Subdomain::Two, j);
    let (p1, p2) = (p.part(Subdomain::One)[c1], p.part(Subdomain::Two)[c2]);
    let z1 = problem.elevation(grid.cell_center(Subdomain::One, c1).0);
    let z2 = problem.elevation(grid.cell_center(Subdomain::Two, c2).0);
    let zg = problem.elevation(grid.x_split);
    let t1 = half_transmissibility(problem.material(Subdomain::One).mobility(p1), length, half);
    let t2 = half_transmissibility(problem.material(Subdomain::Two).mobility(p2), length, half);
    let (psi1, psi2) = (p1 + z1, p2 + z2);
    let flux = harmonic(t1, t2) * (psi1 - psi2) / length;
    let psi_gamma = if t1 + t2 > 0.0 {
        (t1 * psi1 + t2 * psi2) / (t1 + t2)
    } else {
        0.5 * (psi1 + psi2)
    };
    (flux, psi_gamma - zg)
}

/// Outward flux density through an exterior face, mobility taken at the cell.
pub(crate) fn boundary_flux(
    problem: &FlowProblem,
    face: &BoundaryFace,
    p_cell: f64,
    t: f64,
) -> Result<f64> {
    Ok(match problem.boundary.evaluate(face, t)? {
        BoundaryCondition::Dirichlet(pb) => {
            let (xc, _) = problem.grid.cell_center(face.subdomain, face.cell);
            let mob = problem.material(face.subdomain).mobility(p_cell);
            let tb = half_transmissibility(mob, face.length, face.half_distance);
            tb * (p_cell + problem.elevation(xc) - pb - problem.elevation(face.x)) / face.length
        }
        BoundaryCondition::Neumann(q) => -q,
    })
}

/// TPFA fluxes of the pressure field `p` with cell-centred mobilities.
pub fn flux_field(problem: &FlowProblem, p: &CellField, t: f64) -> Result<FluxField> {
    let grid = &problem.grid;
    grid.check_field(p)?;
    let mut interior: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut boundary: [Vec<(BoundaryFace, f64)>; 2] = [Vec::new(), Vec::new()];
    for sub in Subdomain::BOTH {
        let model = problem.material(sub);
        let values = p.part(sub);
        let psi: Vec<f64> = (0..values.len())
            .map(|c| values[c] + problem.elevation(grid.cell_center(sub, c).0))
            .collect();
        interior[sub.index()] = interior_faces(grid, sub)
            .into_iter()
            .map(|f| {
                let (length, _) = face_geometry(grid, f.direction);
                let t = face_transmissibility(
                    grid,
                    model.mobility(values[f.left]),
                    model.mobility(values[f.right]),
                    f.direction,
                );
                t * (psi[f.left] - psi[f.right]) / length
            })
            .collect();
        boundary[sub.index()] = grid
            .boundary_faces(sub)
            .into_iter()
            .map(|face| Ok((face, boundary_flux(problem, &face, values[face.cell], t)?)))
            .collect::<Result<_>>()?;
    }
    let (interface, interface_pressure) = (0..grid.ny)
        .map(|j| interface_flux(grid, problem, p, j))
        .unzip();
    Ok(FluxField {
        interior,
        interface,
        interface_pressure,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::ConstitutiveModel;
    use crate::grid::GridSpec;
    use crate::problem::{BoundaryKind, BoundarySpec};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn linear_problem(
        h: f64,
        gravity: f64,
        p: impl Fn(f64, f64) -> f64 + Send + Sync + Copy + 'static,
    ) -> FlowProblem {
        let grid = DecomposedGrid::new(&GridSpec::unit_pair(h)).unwrap();
        let m = ConstitutiveModel::linear(1.0, 1.0).unwrap();
        FlowProblem {
            name: "test".into(),
            grid,
            materials: [m, m],
            gravity,
            boundary: BoundarySpec::everywhere(BoundaryKind::Dirichlet, move |x, y, _| p(x, y)),
            source: None,
            initial: Arc::new(move |_, x, y, _| p(x, y)),
            exact: None,
        }
    }

    #[test]
    fn transmissibility_by_hand() {
        let g = DecomposedGrid::new(&GridSpec::unit_pair(0.5)).unwrap();
        assert_relative_eq!(face_transmissibility(&g, 1.0, 1.0, FaceDirection::X), 1.0);
        assert_eq!(face_transmissibility(&g, 0.0, 1.0, FaceDirection::X), 0.0);
        assert_eq!(face_transmissibility(&g, 0.0, 0.0, FaceDirection::Y), 0.0);
        let g = DecomposedGrid::new(&GridSpec::unit_pair(1.0)).unwrap();
        assert_relative_eq!(face_transmissibility(&g, 1.0, 3.0, FaceDirection::X), 1.5);
    }

    #[test]
    fn linear_pressure_gives_unit_flux() {
        let prob = linear_problem(0.25, 0.0, |x, _| -x);
        let p = prob.grid.sample(|_, x, y| -x + 0.0 * y);
        let f = flux_field(&prob, &p, 0.0).unwrap();
        for sub in Subdomain::BOTH {
            for (face, v) in interior_faces(&prob.grid, sub)
                .iter()
                .zip(&f.interior[sub.index()])
            {
                let expected = if face.direction == FaceDirection::X {
                    1.0
                } else {
                    0.0
                };
                assert!((v - expected).abs() < 1e-13);
            }
            for (face, v) in &f.boundary[sub.index()] {
                let n = match face.side {
                    crate::grid::Side::West => -1.0,
                    crate::grid::Side::East => 1.0,
                    _ => 0.0,
                };
                assert!((v - n).abs() < 1e-13);
            }
        }
        for (q, pg) in f.interface.iter().zip(&f.interface_pressure) {
            assert!((q - 1.0).abs() < 1e-13);
            assert!(pg.abs() < 1e-14);
        }
    }

    #[test]
    fn constant_pressure_has_no_flux() {
        let prob = linear_problem(0.25, 0.0, |_, _| 2.0);
        let p = CellField::constant(&prob.grid, 2.0);
        let f = flux_field(&prob, &p, 0.0).unwrap();
        assert!(f.interior.iter().flatten().all(|v| v.abs() < 1e-15));
        assert!(f.interface.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn gravity_drives_flux_along_x() {
        // two cells per row, z = -x, unit mobility
        let prob = linear_problem(1.0, 1.0, |_, _| 0.0);
        let p = CellField::constant(&prob.grid, 0.0);
        let f = flux_field(&prob, &p, 0.0).unwrap();
        let t = face_transmissibility(&prob.grid, 1.0, 1.0, FaceDirection::X);
        let (x_l, x_r) = (-0.5, 0.5);
        assert_relative_eq!(
            f.interface[0] * prob.grid.dy,
            t * (x_r - x_l),
            max_relative = 1e-14
        );
    }
}
