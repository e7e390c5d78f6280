//! Robin transmission data on the interface and its exchange between subdomains.
//!
//! All three decoupling variants share one algebraic shape. On side `l`
//!
//! ```text
//! F·n_l = a·g_l + b·p_l          (Robin closure)
//! g_l  <- -c·p_{3-l} - g_{3-l}   (exchange)
//! ```
//!
//! with `(a, b, c) = (1, λ, 2λ)` for the λ-formulation and
//! `(M, Mη, 2η)` for the generalized one, where `g` then stores `(1-η)·g`.

use crate::error::{invalid, Result};
use crate::grid::{CellField, Subdomain};
use crate::problem::FlowProblem;

use super::tpfa::interface_flux;

/// Which Robin decoupling to use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterfaceFormulation {
    /// `F·n = g + λp`, `g_l = -2λ p_{3-l} - g_{3-l}`.
    Lambda { lambda: f64 },
    /// `F·n = (1-η)g + ηp`, stored as `(1-η)g`.
    Convex { eta: f64 },
    /// `F·n = M[(1-η)g + ηp]`; the stored Robin data is the effective `(1-η)g`.
    Generalized { scale: f64, eta: f64 },
}

impl InterfaceFormulation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Lambda { lambda } if !(lambda > 0.0 && lambda.is_finite()) => Err(invalid(
                format!("Robin weight λ must be positive, got {lambda}"),
            )),
            Self::Convex { eta } | Self::Generalized { eta, .. } if !(eta > 0.0 && eta < 1.0) => {
                Err(invalid(format!("η must lie in (0, 1), got {eta}")))
            }
            Self::Generalized { scale, .. } if !(scale > 0.0 && scale.is_finite()) => Err(invalid(
                format!("generalized scale M must be positive, got {scale}"),
            )),
            _ => Ok(()),
        }
    }

    /// The generalized parameters that reproduce the λ-formulation.
    pub fn lambda_as_generalized(lambda: f64) -> Self {
        let eta = lambda / (1.0 + lambda);
        Self::Generalized {
            scale: 1.0 / (1.0 - eta),
            eta,
        }
    }

    pub fn coupling(&self) -> RobinCoupling {
        match *self {
            Self::Lambda { lambda } => RobinCoupling {
                flux_scale: 1.0,
                pressure_weight: lambda,
                exchange: 2.0 * lambda,
            },
            Self::Convex { eta } => RobinCoupling {
                flux_scale: 1.0,
                pressure_weight: eta,
                exchange: 2.0 * eta,
            },
            Self::Generalized { scale, eta } => RobinCoupling {
                flux_scale: scale,
                pressure_weight: scale * eta,
                exchange: 2.0 * eta,
            },
        }
    }
}

/// Coefficients `(a, b, c)` of the closure and exchange.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinCoupling {
    pub flux_scale: f64,
    pub pressure_weight: f64,
    pub exchange: f64,
}

impl RobinCoupling {
    /// Interface pressure eliminated from the one-sided TPFA flux.
    ///
    /// Solves `-k (p_Γ + Δz - p_cell) = a g + b p_Γ` with `k = mobility / half_distance`.
    pub fn trace(&self, p_cell: f64, g: f64, mobility: f64, half_distance: f64, dz: f64) -> f64 {
        let k = mobility / half_distance;
        (k * p_cell - k * dz - self.flux_scale * g) / (k + self.pressure_weight)
    }

    /// `F·n` implied by the Robin condition.
    pub fn flux(&self, g: f64, trace: f64) -> f64 {
        self.flux_scale * g + self.pressure_weight * trace
    }
}

/// Interface pressure from the λ-formulation Robin closure.
///
/// `p_Γ = (k p_cell - k Δz - g) / (k + λ)` with `k = mobility / half_distance`.
pub fn interface_trace(
    p_cell: f64,
    g: f64,
    lambda: f64,
    mobility: f64,
    half_distance: f64,
    dz: f64,
) -> f64 {
    InterfaceFormulation::Lambda { lambda }
        .coupling()
        .trace(p_cell, g, mobility, half_distance, dz)
}

/// Robin data and interface pressures, one entry per interface face.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceState {
    pub g: [Vec<f64>; 2],
    pub traces: [Vec<f64>; 2],
}

impl InterfaceState {
    pub fn zeros(n_faces: usize) -> Self {
        Self {
            g: [vec![0.0; n_faces], vec![0.0; n_faces]],
            traces: [vec![0.0; n_faces], vec![0.0; n_faces]],
        }
    }

    pub fn n_faces(&self) -> usize {
        self.g[0].len()
    }

    pub fn g(&self, sub: Subdomain) -> &[f64] {
        &self.g[sub.index()]
    }

    pub fn trace(&self, sub: Subdomain) -> &[f64] {
        &self.traces[sub.index()]
    }

    /// Robin fluxes `F·n_l` of one side.
    pub fn fluxes(&self, sub: Subdomain, coupling: &RobinCoupling) -> Vec<f64> {
        self.g(sub)
            .iter()
            .zip(self.trace(sub))
            .map(|(&g, &p)| coupling.flux(g, p))
            .collect()
    }

    /// `|p_Γ,1 - p_Γ,2|` per face.
    pub fn pressure_jump(&self) -> Vec<f64> {
        self.traces[0]
            .iter()
            .zip(&self.traces[1])
            .map(|(a, b)| (a - b).abs())
            .collect()
    }

    /// `|F₁·n₁ + F₂·n₂|` per face.
    pub fn flux_jump(&self, coupling: &RobinCoupling) -> Vec<f64> {
        let f1 = self.fluxes(Subdomain::One, coupling);
        let f2 = self.fluxes(Subdomain::Two, coupling);
        f1.iter().zip(&f2).map(|(a, b)| (a + b).abs()).collect()
    }
}

/// Initial Robin data `g_l = (F·n_l - b p_Γ) / a` from a known pressure field.
///
/// The flux is the two-sided TPFA flux across the interface and `p_Γ` the
/// interface pressure that makes it continuous.
pub fn init_interface(
    problem: &FlowProblem,
    formulation: &InterfaceFormulation,
    p: &CellField,
) -> Result<InterfaceState> {
    formulation.validate()?;
    problem.grid.check_field(p)?;
    let coupling = formulation.coupling();
    let ny = problem.grid.ny;
    let mut state = InterfaceState::zeros(ny);
    for j in 0..ny {
        let (flux, p_gamma) = interface_flux(&problem.grid, problem, p, j);
        for sub in Subdomain::BOTH {
            let fn_l = sub.interface_normal() * flux;
            state.g[sub.index()][j] =
                (fn_l - coupling.pressure_weight * p_gamma) / coupling.flux_scale;
            state.traces[sub.index()][j] = p_gamma;
        }
    }
    Ok(state)
}

/// Exchange step: both sides read the previous iterate simultaneously.
pub fn update_g(state: &InterfaceState, coupling: &RobinCoupling) -> InterfaceState {
    let exchange = |from: usize| -> Vec<f64> {
        state.traces[from]
            .iter()
            .zip(&state.g[from])
            .map(|(&p, &g)| -coupling.exchange * p - g)
            .collect()
    };
    InterfaceState {
        g: [exchange(1), exchange(0)],
        traces: state.traces.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trace_by_hand() {
        assert_relative_eq!(interface_trace(2.0, 0.0, 2.0, 1.0, 0.5, 0.0), 1.0);
        assert_relative_eq!(interface_trace(1.0, -2.0, 1.0, 2.0, 0.5, 0.0), 1.2);
        let p = interface_trace(0.7, 0.0, 1e-12, 1.0, 0.5, 0.0);
        assert!((p - 0.7).abs() < 1e-11);
    }

    #[test]
    fn trace_satisfies_closure() {
        let c = InterfaceFormulation::Generalized {
            scale: 1.7,
            eta: 0.3,
        }
        .coupling();
        let (pc, g, mob, half, dz) = (-0.4, 0.25, 0.8, 0.01, -0.02);
        let pg = c.trace(pc, g, mob, half, dz);
        let one_sided = -(mob / half) * (pg + dz - pc);
        assert_relative_eq!(one_sided, c.flux(g, pg), max_relative = 1e-12);
    }

    #[test]
    fn exchange_by_hand() {
        let c = InterfaceFormulation::Lambda { lambda: 4.0 }.coupling();
        let s = InterfaceState {
            g: [vec![0.0], vec![2.0]],
            traces: [vec![0.0], vec![-1.0]],
        };
        let n = update_g(&s, &c);
        assert_relative_eq!(n.g[0][0], 6.0);

        let c = InterfaceFormulation::Lambda { lambda: 1.0 }.coupling();
        let z = InterfaceState::zeros(3);
        assert_eq!(update_g(&z, &c), z);
    }

    #[test]
    fn consistent_state_is_a_fixed_point() {
        let lambda = 3.0;
        let c = InterfaceFormulation::Lambda { lambda }.coupling();
        let (p, f) = (-0.6, 0.35);
        let s = InterfaceState {
            g: [vec![-lambda * p + f], vec![-lambda * p - f]],
            traces: [vec![p], vec![p]],
        };
        let n = update_g(&s, &c);
        assert_relative_eq!(n.g[0][0], s.g[0][0], max_relative = 1e-15);
        assert_relative_eq!(n.g[1][0], s.g[1][0], max_relative = 1e-15);
        assert!(s.flux_jump(&c)[0] < 1e-15);
        assert_eq!(s.pressure_jump()[0], 0.0);
    }

    #[test]
    fn formulation_checks() {
        assert!(InterfaceFormulation::Lambda { lambda: 0.0 }
            .validate()
            .is_err());
        assert!(InterfaceFormulation::Convex { eta: 1.0 }
            .validate()
            .is_err());
        assert!(InterfaceFormulation::Generalized {
            scale: 0.0,
            eta: 0.5
        }
        .validate()
        .is_err());
        let g = InterfaceFormulation::lambda_as_generalized(4.0).coupling();
        let l = InterfaceFormulation::Lambda { lambda: 4.0 }.coupling();
        assert_relative_eq!(g.pressure_weight, l.pressure_weight, max_relative = 1e-14);
    }
}
