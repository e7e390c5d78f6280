//! Uniform cell-centred mesh of two rectangles sharing a vertical interface.
//!
//! Cells are numbered row-major inside each subdomain (`j * nx + i`, `i`
//! along x, `j` along y). The monolithic numbering puts every cell of Ω₁
//! before every cell of Ω₂.

use crate::error::{Error, Result};

/// One of the two subdomains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subdomain {
    One,
    Two,
}

impl Subdomain {
    pub const BOTH: [Subdomain; 2] = [Subdomain::One, Subdomain::Two];

    pub fn index(self) -> usize {
        match self {
            Subdomain::One => 0,
            Subdomain::Two => 1,
        }
    }

    pub fn other(self) -> Subdomain {
        match self {
            Subdomain::One => Subdomain::Two,
            Subdomain::Two => Subdomain::One,
        }
    }

    /// x component of the outer normal of this subdomain on the interface.
    pub fn interface_normal(self) -> f64 {
        match self {
            Subdomain::One => 1.0,
            Subdomain::Two => -1.0,
        }
    }
}

/// Geometry and resolution requested for a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_split: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
}

impl GridSpec {
    /// `(-1, 0) × (0, 1)` and `(0, 1) × (0, 1)` with square cells of side `h`.
    pub fn unit_pair(h: f64) -> Self {
        Self {
            x_min: -1.0,
            x_split: 0.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
            dx: h,
            dy: h,
        }
    }
}

/// The six exterior sides of the decomposed rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `x = x_min`, belongs to Ω₁.
    West,
    /// `x = x_max`, belongs to Ω₂.
    East,
    /// `y = y_min` of the given subdomain.
    South(Subdomain),
    /// `y = y_max` of the given subdomain.
    North(Subdomain),
}

/// An exterior face: the owning cell, its side and the face centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFace {
    pub subdomain: Subdomain,
    pub cell: usize,
    pub side: Side,
    pub x: f64,
    pub y: f64,
    /// Face length.
    pub length: f64,
    /// Distance from the cell centre to the face.
    pub half_distance: f64,
}

/// One interface face with the cell on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePair {
    pub cell_one: usize,
    pub cell_two: usize,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedGrid {
    pub x_min: f64,
    pub x_split: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
    pub n1x: usize,
    pub n2x: usize,
    pub ny: usize,
}

fn divide(extent: f64, h: f64, what: &str) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Grid(format!(
            "{what} cell size must be positive, got {h}"
        )));
    }
    if !(extent > 0.0) {
        return Err(Error::Grid(format!(
            "{what} extent must be positive, got {extent}"
        )));
    }
    let ratio = extent / h;
    let n = ratio.round();
    if n < 1.0 {
        return Err(Error::Grid(format!(
            "{what} extent {extent} holds no cell of size {h}"
        )));
    }
    if (ratio - n).abs() > 1e-12 * n.max(1.0) {
        return Err(Error::Grid(format!(
            "{what} extent {extent} is not a multiple of the cell size {h}"
        )));
    }
    Ok(n as usize)
}

impl DecomposedGrid {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        let n1x = divide(spec.x_split - spec.x_min, spec.dx, "Ω₁ x")?;
        let n2x = divide(spec.x_max - spec.x_split, spec.dx, "Ω₂ x")?;
        let ny = divide(spec.y_max - spec.y_min, spec.dy, "y")?;
        Ok(Self {
            x_min: spec.x_min,
            x_split: spec.x_split,
            x_max: spec.x_max,
            y_min: spec.y_min,
            y_max: spec.y_max,
            dx: (spec.x_split - spec.x_min) / n1x as f64,
            dy: (spec.y_max - spec.y_min) / ny as f64,
            n1x,
            n2x,
            ny,
        })
    }

    pub fn nx(&self, sub: Subdomain) -> usize {
        match sub {
            Subdomain::One => self.n1x,
            Subdomain::Two => self.n2x,
        }
    }

    pub fn cell_count(&self, sub: Subdomain) -> usize {
        self.nx(sub) * self.ny
    }

    pub fn total_cells(&self) -> usize {
        (self.n1x + self.n2x) * self.ny
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }

    fn x_origin(&self, sub: Subdomain) -> f64 {
        match sub {
            Subdomain::One => self.x_min,
            Subdomain::Two => self.x_split,
        }
    }

    pub fn cell_index(&self, sub: Subdomain, i: usize, j: usize) -> usize {
        j * self.nx(sub) + i
    }

    /// `(i, j)` of a subdomain-local cell index.
    pub fn cell_ij(&self, sub: Subdomain, cell: usize) -> (usize, usize) {
        let nx = self.nx(sub);
        (cell % nx, cell / nx)
    }

    pub fn cell_center(&self, sub: Subdomain, cell: usize) -> (f64, f64) {
        let (i, j) = self.cell_ij(sub, cell);
        (
            self.x_origin(sub) + (i as f64 + 0.5) * self.dx,
            self.y_min + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Offset of a subdomain's first cell in the monolithic numbering.
    pub fn monolithic_offset(&self, sub: Subdomain) -> usize {
        match sub {
            Subdomain::One => 0,
            Subdomain::Two => self.cell_count(Subdomain::One),
        }
    }

    /// Interface faces ordered by increasing y.
    pub fn interface_pairing(&self) -> Vec<InterfacePair> {
        (0..self.ny)
            .map(|j| InterfacePair {
                cell_one: self.cell_index(Subdomain::One, self.n1x - 1, j),
                cell_two: self.cell_index(Subdomain::Two, 0, j),
                y: self.y_min + (j as f64 + 0.5) * self.dy,
            })
            .collect()
    }

    /// Interface-adjacent cell of `sub` in row `j`.
    pub fn interface_cell(&self, sub: Subdomain, j: usize) -> usize {
        match sub {
            Subdomain::One => self.cell_index(sub, self.n1x - 1, j),
            Subdomain::Two => self.cell_index(sub, 0, j),
        }
    }

    /// All exterior faces of one subdomain (the interface excluded).
    pub fn boundary_faces(&self, sub: Subdomain) -> Vec<BoundaryFace> {
        let nx = self.nx(sub);
        let x0 = self.x_origin(sub);
        let mut faces = Vec::with_capacity(2 * nx + self.ny);
        for i in 0..nx {
            let x = x0 + (i as f64 + 0.5) * self.dx;
            faces.push(BoundaryFace {
                subdomain: sub,
                cell: self.cell_index(sub, i, 0),
                side: Side::South(sub),
                x,
                y: self.y_min,
                length: self.dx,
                half_distance: 0.5 * self.dy,
            });
            faces.push(BoundaryFace {
                subdomain: sub,
                cell: self.cell_index(sub, i, self.ny - 1),
                side: Side::North(sub),
                x,
                y: self.y_max,
                length: self.dx,
                half_distance: 0.5 * self.dy,
            });
        }
        for j in 0..self.ny {
            let y = self.y_min + (j as f64 + 0.5) * self.dy;
            let (cell, side, x) = match sub {
                Subdomain::One => (self.cell_index(sub, 0, j), Side::West, self.x_min),
                Subdomain::Two => (self.cell_index(sub, nx - 1, j), Side::East, self.x_max),
            };
            faces.push(BoundaryFace {
                subdomain: sub,
                cell,
                side,
                x,
                y,
                length: self.dy,
                half_distance: 0.5 * self.dx,
            });
        }
        faces
    }

    /// Samples `f(sub, x, y)` at every cell centre.
    pub fn sample(&self, mut f: impl FnMut(Subdomain, f64, f64) -> f64) -> CellField {
        let part = |sub: Subdomain, f: &mut dyn FnMut(Subdomain, f64, f64) -> f64| {
            (0..self.cell_count(sub))
                .map(|c| {
                    let (x, y) = self.cell_center(sub, c);
                    f(sub, x, y)
                })
                .collect::<Vec<_>>()
        };
        let one = part(Subdomain::One, &mut f);
        let two = part(Subdomain::Two, &mut f);
        CellField { parts: [one, two] }
    }

    pub fn check_field(&self, field: &CellField) -> Result<()> {
        for sub in Subdomain::BOTH {
            let n = field.part(sub).len();
            if n != self.cell_count(sub) {
                return Err(Error::DimensionMismatch {
                    expected: self.cell_count(sub),
                    found: n,
                });
            }
        }
        Ok(())
    }

    /// `sqrt(Σ v² dx dy)` over both subdomains.
    pub fn l2_norm(&self, field: &CellField) -> Result<f64> {
        self.check_field(field)?;
        Ok(l2_cell_norm(field.iter(), self.cell_volume()))
    }

    pub fn linf_norm(&self, field: &CellField) -> Result<f64> {
        self.check_field(field)?;
        Ok(linf_norm(field.iter()))
    }

    /// `sqrt(Σ v² dy)` over the interface faces.
    pub fn l2_interface_norm(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.ny {
            return Err(Error::DimensionMismatch {
                expected: self.ny,
                found: values.len(),
            });
        }
        Ok(l2_cell_norm(values.iter().copied(), self.dy))
    }
}

pub fn l2_cell_norm(values: impl IntoIterator<Item = f64>, measure: f64) -> f64 {
    (values.into_iter().map(|v| v * v).sum::<f64>() * measure).sqrt()
}

pub fn linf_norm(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(
        0.0,
        |m, v| {
            if v.is_nan() {
                f64::NAN
            } else {
                m.max(v.abs())
            }
        },
    )
}

/// Cell-centred values on both subdomains.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    pub parts: [Vec<f64>; 2],
}

impl CellField {
    pub fn constant(grid: &DecomposedGrid, value: f64) -> Self {
        Self {
            parts: [
                vec![value; grid.cell_count(Subdomain::One)],
                vec![value; grid.cell_count(Subdomain::Two)],
            ],
        }
    }

    pub fn part(&self, sub: Subdomain) -> &[f64] {
        &self.parts[sub.index()]
    }

    pub fn part_mut(&mut self, sub: Subdomain) -> &mut Vec<f64> {
        &mut self.parts[sub.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.parts[0].iter().chain(self.parts[1].iter()).copied()
    }

    pub fn to_monolithic(&self) -> Vec<f64> {
        self.iter().collect()
    }

    pub fn from_monolithic(grid: &DecomposedGrid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.total_cells() {
            return Err(Error::DimensionMismatch {
                expected: grid.total_cells(),
                found: values.len(),
            });
        }
        let (a, b) = values.split_at(grid.cell_count(Subdomain::One));
        Ok(Self {
            parts: [a.to_vec(), b.to_vec()],
        })
    }

    /// `self - other`, cell by cell.
    pub fn difference(&self, other: &CellField) -> CellField {
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();
        CellField {
            parts: [
                diff(&self.parts[0], &other.parts[0]),
                diff(&self.parts[1], &other.parts[1]),
            ],
        }
    }

    pub fn all_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }
}
