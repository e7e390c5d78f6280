//! Everything a discretized run needs to know about a flow problem.

use std::fmt;
use std::sync::Arc;

use crate::constitutive::ConstitutiveModel;
use crate::error::{Error, Result};
use crate::grid::{BoundaryFace, DecomposedGrid, Side, Subdomain};

/// `(subdomain, x, y, t) -> value`.
pub type ScalarFn = Arc<dyn Fn(Subdomain, f64, f64, f64) -> f64 + Send + Sync>;
/// `(x, y, t) -> value` along a boundary segment.
pub type BoundaryFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Prescribed pressure.
    Dirichlet,
    /// Prescribed normal flux into the domain; zero is no-flow.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet(f64),
    /// Inflow flux density.
    Neumann(f64),
}

#[derive(Clone)]
pub struct BoundarySegment {
    pub side: Side,
    pub kind: BoundaryKind,
    /// Half-open range `[a, b)` of the tangential coordinate; `None` is the whole side.
    pub range: Option<(f64, f64)>,
    pub value: BoundaryFn,
}

impl fmt::Debug for BoundarySegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySegment")
            .field("side", &self.side)
            .field("kind", &self.kind)
            .field("range", &self.range)
            .finish_non_exhaustive()
    }
}

impl BoundarySegment {
    pub fn new(
        side: Side,
        kind: BoundaryKind,
        value: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            side,
            kind,
            range: None,
            value: Arc::new(value),
        }
    }

    pub fn on_range(mut self, from: f64, to: f64) -> Self {
        self.range = Some((from, to));
        self
    }

    fn covers(&self, face: &BoundaryFace) -> bool {
        if self.side != face.side {
            return false;
        }
        let s = match face.side {
            Side::West | Side::East => face.y,
            Side::South(_) | Side::North(_) => face.x,
        };
        self.range.is_none_or(|(a, b)| a <= s && s < b)
    }
}

/// Boundary data for all exterior faces.
#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    pub segments: Vec<BoundarySegment>,
}

impl BoundarySpec {
    pub fn new(segments: Vec<BoundarySegment>) -> Self {
        Self { segments }
    }

    /// Same condition on all six sides.
    pub fn everywhere(
        kind: BoundaryKind,
        value: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let value: BoundaryFn = Arc::new(value);
        let segments = all_sides()
            .into_iter()
            .map(|side| BoundarySegment {
                side,
                kind,
                range: None,
                value: value.clone(),
            })
            .collect();
        Self { segments }
    }

    /// The unique segment covering `face`.
    pub fn segment_for(&self, face: &BoundaryFace) -> Result<&BoundarySegment> {
        let mut hits = self.segments.iter().filter(|s| s.covers(face));
        match (hits.next(), hits.next()) {
            (Some(s), None) => Ok(s),
            (None, _) => Err(Error::Boundary(format!(
                "exterior face at ({}, {}) on {:?} is not covered",
                face.x, face.y, face.side
            ))),
            (Some(_), Some(_)) => Err(Error::Boundary(format!(
                "exterior face at ({}, {}) on {:?} is covered more than once",
                face.x, face.y, face.side
            ))),
        }
    }

    pub fn evaluate(&self, face: &BoundaryFace, t: f64) -> Result<BoundaryCondition> {
        let seg = self.segment_for(face)?;
        let v = (seg.value)(face.x, face.y, t);
        Ok(match seg.kind {
            BoundaryKind::Dirichlet => BoundaryCondition::Dirichlet(v),
            BoundaryKind::Neumann => BoundaryCondition::Neumann(v),
        })
    }

    /// Checks that every exterior face is covered exactly once.
    pub fn validate(&self, grid: &DecomposedGrid) -> Result<()> {
        for sub in Subdomain::BOTH {
            for face in grid.boundary_faces(sub) {
                self.segment_for(&face)?;
            }
        }
        Ok(())
    }
}

fn all_sides() -> [Side; 6] {
    [
        Side::West,
        Side::East,
        Side::South(Subdomain::One),
        Side::North(Subdomain::One),
        Side::South(Subdomain::Two),
        Side::North(Subdomain::Two),
    ]
}

/// A flow problem on a decomposed grid.
///
/// The flux is `F = -k(S(p)) ∇(p + z)` with elevation `z = -gravity · x`,
/// i.e. gravity pulls along `+x`.
#[derive(Clone)]
pub struct FlowProblem {
    pub name: String,
    pub grid: DecomposedGrid,
    pub materials: [ConstitutiveModel; 2],
    pub gravity: f64,
    pub boundary: BoundarySpec,
    pub source: Option<ScalarFn>,
    /// Pressure at the start time; also evaluated at later times when a
    /// run restarts from an exact state.
    pub initial: ScalarFn,
    pub exact: Option<ScalarFn>,
}

impl fmt::Debug for FlowProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowProblem")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .field("materials", &self.materials)
            .field("gravity", &self.gravity)
            .field("boundary", &self.boundary)
            .field("has_source", &self.source.is_some())
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl FlowProblem {
    pub fn material(&self, sub: Subdomain) -> &ConstitutiveModel {
        &self.materials[sub.index()]
    }

    pub fn elevation(&self, x: f64) -> f64 {
        -self.gravity * x
    }

    pub fn source_at(&self, sub: Subdomain, x: f64, y: f64, t: f64) -> f64 {
        self.source.as_ref().map_or(0.0, |f| f(sub, x, y, t))
    }

    pub fn validate(&self) -> Result<()> {
        self.boundary.validate(&self.grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn everywhere_covers_all_faces() {
        let g = DecomposedGrid::new(&GridSpec::unit_pair(0.25)).unwrap();
        let bc = BoundarySpec::everywhere(BoundaryKind::Dirichlet, |x, _, _| x);
        bc.validate(&g).unwrap();
        let f = g.boundary_faces(Subdomain::Two)[0];
        assert_eq!(
            bc.evaluate(&f, 0.0).unwrap(),
            BoundaryCondition::Dirichlet(f.x)
        );
    }

    #[test]
    fn gaps_and_overlaps_are_rejected() {
        let g = DecomposedGrid::new(&GridSpec::unit_pair(0.25)).unwrap();
        let mut bc = BoundarySpec::everywhere(BoundaryKind::Dirichlet, |_, _, _| 0.0);
        bc.segments.remove(0);
        assert!(matches!(bc.validate(&g), Err(Error::Boundary(_))));

        let mut bc = BoundarySpec::everywhere(BoundaryKind::Dirichlet, |_, _, _| 0.0);
        bc.segments.push(
            BoundarySegment::new(Side::West, BoundaryKind::Neumann, |_, _, _| 0.0)
                .on_range(0.0, 0.5),
        );
        assert!(bc.validate(&g).is_err());
    }

    #[test]
    fn split_side() {
        let g = DecomposedGrid::new(&GridSpec::unit_pair(0.25)).unwrap();
        let mut bc = BoundarySpec::everywhere(BoundaryKind::Dirichlet, |_, _, _| 0.0);
        bc.segments.retain(|s| s.side != Side::West);
        bc.segments.push(
            BoundarySegment::new(Side::West, BoundaryKind::Neumann, |_, _, _| 1.0)
                .on_range(0.0, 0.5),
        );
        bc.segments.push(
            BoundarySegment::new(Side::West, BoundaryKind::Dirichlet, |_, _, _| 2.0)
                .on_range(0.5, 1.0),
        );
        bc.validate(&g).unwrap();
        let west: Vec<_> = g
            .boundary_faces(Subdomain::One)
            .into_iter()
            .filter(|f| f.side == Side::West)
            .map(|f| bc.evaluate(&f, 0.0).unwrap())
            .collect();
        assert_eq!(west[0], BoundaryCondition::Neumann(1.0));
        assert_eq!(west[3], BoundaryCondition::Dirichlet(2.0));
    }
}
