//! The two benchmark problems on `Ω₁ = (-1,0)×(0,1)`, `Ω₂ = (0,1)×(0,1)`.
//!
//! * a manufactured solution with power-law materials and no gravity;
//! * a nondimensionalized van Genuchten–Mualem problem with gravity along `+x`.

use std::sync::Arc;

use crate::constitutive::{ConstitutiveModel, VanGenuchtenModel};
use crate::error::{invalid, Result};
use crate::grid::{DecomposedGrid, GridSpec, Side, Subdomain};
use crate::problem::{BoundaryKind, BoundarySegment, BoundarySpec, FlowProblem};

/// `p₁ = 1 - (1+t²)(1+x²+y²)`, `p₂ = 1 - (1+t²)(1+y²)`.
pub fn exact_pressure(sub: Subdomain, x: f64, y: f64, t: f64) -> f64 {
    let time = 1.0 + t * t;
    match sub {
        Subdomain::One => 1.0 - time * (1.0 + x * x + y * y),
        Subdomain::Two => 1.0 - time * (1.0 + y * y),
    }
}

/// Right-hand side that makes [`exact_pressure`] solve `∂ₜS(p) - ∇·(k∇p) = f`.
pub fn source_term(sub: Subdomain, x: f64, y: f64, t: f64) -> f64 {
    let time = 1.0 + t * t;
    match sub {
        Subdomain::One => {
            let r = 1.0 + x * x + y * y;
            4.0 / (r * r) - t / (time.powi(3) * r).sqrt()
        }
        Subdomain::Two => {
            let r = 1.0 + y * y;
            2.0 * (1.0 - y * y) / (r * r) - 2.0 * t / (3.0 * (time.powi(4) * r).cbrt())
        }
    }
}

/// Dirichlet data of the manufactured case: the trace of the exact solution.
pub fn manufactured_bc(x: f64, y: f64, t: f64) -> f64 {
    let sub = if x <= 0.0 {
        Subdomain::One
    } else {
        Subdomain::Two
    };
    exact_pressure(sub, x, y, t)
}

/// Boundary data of the manufactured case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ManufacturedBoundary {
    /// No flow through `y = 0`, where the exact flux vanishes; exact trace elsewhere.
    #[default]
    NoFlowBottom,
    /// Exact trace on every side.
    Dirichlet,
}

/// Manufactured problem on a grid of spacing `dx × dy` with the default boundary.
pub fn manufactured_problem(dx: f64, dy: f64) -> Result<FlowProblem> {
    manufactured_problem_with(dx, dy, ManufacturedBoundary::default())
}

pub fn manufactured_problem_with(
    dx: f64,
    dy: f64,
    boundary: ManufacturedBoundary,
) -> Result<FlowProblem> {
    let spec = GridSpec {
        dx,
        dy,
        ..GridSpec::unit_pair(dx)
    };
    let mut bc = BoundarySpec::everywhere(BoundaryKind::Dirichlet, manufactured_bc);
    if boundary == ManufacturedBoundary::NoFlowBottom {
        for seg in &mut bc.segments {
            if matches!(seg.side, Side::South(_)) {
                *seg = BoundarySegment::new(seg.side, BoundaryKind::Neumann, |_, _, _| 0.0);
            }
        }
    }
    let exact: Arc<dyn Fn(Subdomain, f64, f64, f64) -> f64 + Send + Sync> =
        Arc::new(exact_pressure);
    let problem = FlowProblem {
        name: "manufactured".into(),
        grid: DecomposedGrid::new(&spec)?,
        materials: [
            ConstitutiveModel::power_law(1)?,
            ConstitutiveModel::power_law(2)?,
        ],
        gravity: 0.0,
        boundary: bc,
        source: Some(Arc::new(source_term)),
        initial: exact.clone(),
        exact: Some(exact),
    };
    problem.validate()?;
    Ok(problem)
}

/// Left boundary pressure of the realistic case.
///
/// Rises linearly in `y` at rate `t` and is capped at `-ε`; uniformly `-1` at `t = 0`.
pub fn realistic_bc(y: f64, t: f64, epsilon: f64) -> f64 {
    if t <= 0.0 || y < (1.0 - epsilon) / t {
        -1.0 + t * y
    } else {
        -epsilon
    }
}

/// Characteristic scales. `pressure` may carry a sign; its magnitude is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicScales {
    pub pressure: f64,
    pub length: f64,
    pub time: f64,
}

impl CharacteristicScales {
    pub const IDENTITY: Self = Self {
        pressure: 1.0,
        length: 1.0,
        time: 1.0,
    };

    /// `p* = -14.8 kPa`, `x* = 1.48 m`, `t* = 41 440 s`.
    pub const SOIL: Self = Self {
        pressure: -14.8e3,
        length: 1.48,
        time: 41_440.0,
    };

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pressure", self.pressure),
            ("length", self.length),
            ("time", self.time),
        ] {
            if v == 0.0 || !v.is_finite() {
                return Err(invalid(format!(
                    "characteristic {name} scale must be nonzero, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Van Genuchten–Mualem material and fluid data in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalMaterial {
    /// Residual and saturated volumetric water content.
    pub theta_r: f64,
    pub theta_s: f64,
    /// 1/Pa.
    pub alpha: f64,
    pub n: f64,
    /// Absolute permeability, m².
    pub permeability: f64,
    /// Pa·s.
    pub viscosity: f64,
    /// kg/m³.
    pub density: f64,
    /// m/s².
    pub gravity: f64,
}

const WATER_DENSITY: f64 = 1.0e3;
const WATER_VISCOSITY: f64 = 1.0e-3;
const STANDARD_GRAVITY: f64 = 9.81;

impl PhysicalMaterial {
    /// Water in a soil given in the usual cm/day units, `Ks` converted to `κ = Ks μ / (ρ g)`.
    pub fn from_soil_units(
        theta_r: f64,
        theta_s: f64,
        alpha_per_cm: f64,
        n: f64,
        ks_cm_per_day: f64,
    ) -> Self {
        let ks = ks_cm_per_day / 100.0 / 86_400.0;
        Self {
            theta_r,
            theta_s,
            // a pressure head of 1 cm of water is ρ g / 100 Pa
            alpha: alpha_per_cm * 100.0 / (WATER_DENSITY * STANDARD_GRAVITY),
            n,
            permeability: ks * WATER_VISCOSITY / (WATER_DENSITY * STANDARD_GRAVITY),
            viscosity: WATER_VISCOSITY,
            density: WATER_DENSITY,
            gravity: STANDARD_GRAVITY,
        }
    }

    /// Silt loam G.E. 3 (van Genuchten, 1980).
    pub fn silt_loam() -> Self {
        Self::from_soil_units(0.131, 0.396, 0.00423, 2.06, 4.96)
    }

    /// Hygiene sandstone (van Genuchten, 1980).
    pub fn sandstone() -> Self {
        Self::from_soil_units(0.153, 0.25, 0.0079, 10.4, 108.0)
    }
}

/// Dimensionless counterpart of [`PhysicalMaterial`].
///
/// `mobility_scale = κ|p*|t*/(μx*²)`, `gravity_number = ρgx*/|p*|`,
/// `alpha = α|p*|`. Viscosity and gravitational acceleration are carried
/// along so the map can be inverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMaterial {
    pub theta_r: f64,
    pub theta_s: f64,
    pub alpha: f64,
    pub n: f64,
    pub mobility_scale: f64,
    pub gravity_number: f64,
    pub viscosity: f64,
    pub gravity: f64,
}

impl ScaledMaterial {
    /// Storage `θ = φS` with `φ = θ_s` and `S_r = θ_r/θ_s`.
    pub fn model(&self) -> Result<ConstitutiveModel> {
        let vg = VanGenuchtenModel::new(self.theta_r / self.theta_s, 1.0, self.alpha, self.n)?
            .with_porosity(self.theta_s)?
            .with_mobility_scale(self.mobility_scale)?;
        Ok(ConstitutiveModel::VanGenuchten(vg))
    }
}

pub fn nondimensionalize(
    m: &PhysicalMaterial,
    scales: &CharacteristicScales,
) -> Result<ScaledMaterial> {
    scales.validate()?;
    if !(m.viscosity > 0.0) {
        return Err(invalid(format!(
            "viscosity must be positive, got {}",
            m.viscosity
        )));
    }
    let p = scales.pressure.abs();
    Ok(ScaledMaterial {
        theta_r: m.theta_r,
        theta_s: m.theta_s,
        alpha: m.alpha * p,
        n: m.n,
        mobility_scale: m.permeability * p * scales.time
            / (m.viscosity * scales.length * scales.length),
        gravity_number: m.density * m.gravity * scales.length / p,
        viscosity: m.viscosity,
        gravity: m.gravity,
    })
}

pub fn redimensionalize(
    s: &ScaledMaterial,
    scales: &CharacteristicScales,
) -> Result<PhysicalMaterial> {
    scales.validate()?;
    if s.gravity == 0.0 {
        return Err(invalid(
            "gravitational acceleration must be nonzero to recover density",
        ));
    }
    let p = scales.pressure.abs();
    Ok(PhysicalMaterial {
        theta_r: s.theta_r,
        theta_s: s.theta_s,
        alpha: s.alpha / p,
        n: s.n,
        permeability: s.mobility_scale * s.viscosity * scales.length * scales.length
            / (p * scales.time),
        viscosity: s.viscosity,
        density: s.gravity_number * p / (s.gravity * scales.length),
        gravity: s.gravity,
    })
}

/// The realistic two-material problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealisticCase {
    pub materials: [PhysicalMaterial; 2],
    pub scales: CharacteristicScales,
    pub epsilon: f64,
}

impl Default for RealisticCase {
    fn default() -> Self {
        Self {
            materials: [PhysicalMaterial::silt_loam(), PhysicalMaterial::sandstone()],
            scales: CharacteristicScales::SOIL,
            epsilon: 1e-2,
        }
    }
}

impl RealisticCase {
    pub fn scaled(&self) -> Result<[ScaledMaterial; 2]> {
        Ok([
            nondimensionalize(&self.materials[0], &self.scales)?,
            nondimensionalize(&self.materials[1], &self.scales)?,
        ])
    }

    /// Initial pressure `-1`, left boundary [`realistic_bc`], right boundary `-1`,
    /// no flow at `y = 0, 1`.
    pub fn problem(&self, dx: f64, dy: f64) -> Result<FlowProblem> {
        let eps = self.epsilon;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!("ε must lie in (0, 1), got {eps}")));
        }
        let scaled = self.scaled()?;
        let spec = GridSpec {
            dx,
            dy,
            ..GridSpec::unit_pair(dx)
        };
        let no_flow = |side| BoundarySegment::new(side, BoundaryKind::Neumann, |_, _, _| 0.0);
        let boundary = BoundarySpec::new(vec![
            BoundarySegment::new(Side::West, BoundaryKind::Dirichlet, move |_, y, t| {
                realistic_bc(y, t, eps)
            }),
            BoundarySegment::new(Side::East, BoundaryKind::Dirichlet, |_, _, _| -1.0),
            no_flow(Side::South(Subdomain::One)),
            no_flow(Side::North(Subdomain::One)),
            no_flow(Side::South(Subdomain::Two)),
            no_flow(Side::North(Subdomain::Two)),
        ]);
        let problem = FlowProblem {
            name: "realistic".into(),
            grid: DecomposedGrid::new(&spec)?,
            materials: [scaled[0].model()?, scaled[1].model()?],
            gravity: scaled[0].gravity_number,
            boundary,
            source: None,
            initial: Arc::new(|_, _, _, _| -1.0),
            exact: None,
        };
        problem.validate()?;
        Ok(problem)
    }
}
