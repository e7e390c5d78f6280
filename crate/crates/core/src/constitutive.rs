//! Saturation and relative permeability laws.
//!
//! Every model exposes the same set of pointwise functions of pressure:
//! saturation `S(p)`, its derivative, the relative permeability `k(S(p))`,
//! the scaled mobility used by the flux and the stored water content.
//! The mobility scale is part of the model, so assembly never has to know
//! which case it is discretizing.

use crate::error::{invalid, Error, Result};

/// `S(p) = (1 - p)^(-1/(l+1))` for `p < 0`, `1` otherwise; `k(S) = S^(l+1)`.
///
/// Subdomain 1 gives `k = S^2`, subdomain 2 gives `k = S^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawModel {
    subdomain_index: u8,
}

impl PowerLawModel {
    pub fn new(subdomain_index: u8) -> Result<Self> {
        if !(1..=2).contains(&subdomain_index) {
            return Err(invalid(format!(
                "power-law subdomain index must be 1 or 2, got {subdomain_index}"
            )));
        }
        Ok(Self { subdomain_index })
    }

    pub fn subdomain_index(&self) -> u8 {
        self.subdomain_index
    }

    /// `l + 1`, the exponent shared by the saturation root and `k(S)`.
    fn order(&self) -> f64 {
        f64::from(self.subdomain_index) + 1.0
    }

    fn saturation(&self, p: f64) -> f64 {
        if p < 0.0 {
            (1.0 - p).powf(-1.0 / self.order())
        } else {
            1.0
        }
    }

    fn saturation_derivative(&self, p: f64) -> f64 {
        let q = self.order();
        if p <= 0.0 {
            (1.0 - p).powf(-1.0 / q - 1.0) / q
        } else {
            0.0
        }
    }

    fn rel_perm_of_saturation(&self, s: f64) -> f64 {
        s.powf(self.order())
    }

    fn rel_perm_derivative(&self, p: f64) -> f64 {
        let q = self.order();
        q * self.saturation(p).powf(q - 1.0) * self.saturation_derivative(p)
    }
}

/// Van Genuchten retention curve with Mualem relative permeability.
///
/// `Φ(p) = (1 + (-αp)^n)^(-m)`, `m = 1 - 1/n`, and `Φ = 1` for `p >= 0`.
/// `S = S_r + (S_s - S_r)Φ`, `k = √Φ (1 - (1 - Φ^(1/m))^m)^2`.
///
/// `porosity` multiplies the saturation in the stored water content and
/// `mobility_scale` multiplies `k` in the flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanGenuchtenModel {
    pub residual_saturation: f64,
    pub saturated_saturation: f64,
    pub alpha: f64,
    pub n: f64,
    pub porosity: f64,
    pub mobility_scale: f64,
}

impl VanGenuchtenModel {
    /// Model with unit porosity and unit mobility scale.
    pub fn new(
        residual_saturation: f64,
        saturated_saturation: f64,
        alpha: f64,
        n: f64,
    ) -> Result<Self> {
        Self {
            residual_saturation,
            saturated_saturation,
            alpha,
            n,
            porosity: 1.0,
            mobility_scale: 1.0,
        }
        .validated()
    }

    pub fn with_porosity(mut self, porosity: f64) -> Result<Self> {
        self.porosity = porosity;
        self.validated()
    }

    pub fn with_mobility_scale(mut self, scale: f64) -> Result<Self> {
        self.mobility_scale = scale;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let (sr, ss) = (self.residual_saturation, self.saturated_saturation);
        if !(0.0 <= sr && sr < ss && ss <= 1.0) {
            return Err(invalid(format!(
                "van Genuchten saturations need 0 <= S_r < S_s <= 1, got S_r={sr}, S_s={ss}"
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(invalid(format!(
                "van Genuchten alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.n > 1.0) {
            return Err(invalid(format!(
                "van Genuchten n must exceed 1, got {}",
                self.n
            )));
        }
        if !(self.porosity > 0.0 && self.porosity <= 1.0) {
            return Err(invalid(format!(
                "porosity must lie in (0, 1], got {}",
                self.porosity
            )));
        }
        if !(self.mobility_scale > 0.0 && self.mobility_scale.is_finite()) {
            return Err(invalid(format!(
                "mobility scale must be positive, got {}",
                self.mobility_scale
            )));
        }
        Ok(self)
    }

    /// `m = 1 - 1/n`.
    pub fn m(&self) -> f64 {
        1.0 - 1.0 / self.n
    }

    // u = (-αp)^n, zero in the saturated range.
    fn u(&self, p: f64) -> f64 {
        if p < 0.0 {
            (-self.alpha * p).powf(self.n)
        } else {
            0.0
        }
    }

    /// Effective saturation `Φ(p)`.
    pub fn effective_saturation(&self, p: f64) -> f64 {
        (-self.m() * self.u(p).ln_1p()).exp()
    }

    fn effective_saturation_derivative(&self, p: f64) -> f64 {
        if p >= 0.0 {
            return 0.0;
        }
        let m = self.m();
        let u = self.u(p);
        m * self.n * self.alpha * (-self.alpha * p).powf(self.n - 1.0) * (1.0 + u).powf(-m - 1.0)
    }

    fn saturation(&self, p: f64) -> f64 {
        self.residual_saturation
            + (self.saturated_saturation - self.residual_saturation) * self.effective_saturation(p)
    }

    fn saturation_derivative(&self, p: f64) -> f64 {
        (self.saturated_saturation - self.residual_saturation)
            * self.effective_saturation_derivative(p)
    }

    // 1 - (u/(1+u))^m, accurate for u near 0 and for large u
    fn mualem_factor(&self, u: f64) -> f64 {
        let ln_w = if u < 1.0 {
            u.ln() - u.ln_1p()
        } else {
            -(1.0 / u).ln_1p()
        };
        -(self.m() * ln_w).exp_m1()
    }

    fn rel_perm(&self, p: f64) -> f64 {
        let u = self.u(p);
        let phi = self.effective_saturation(p);
        // 1 - Φ^(1/m) = u / (1 + u)
        let b = self.mualem_factor(u);
        (phi.sqrt() * b * b).clamp(0.0, 1.0)
    }

    fn rel_perm_derivative(&self, p: f64) -> f64 {
        let u = self.u(p);
        if p >= 0.0 || u == 0.0 {
            return 0.0;
        }
        let m = self.m();
        let phi = self.effective_saturation(p);
        let w = u / (1.0 + u);
        let b = self.mualem_factor(u);
        let dphi = self.effective_saturation_derivative(p);
        // dw/dp = u' / (1+u)^2 with u' = -α n (-αp)^(n-1)
        let du = -self.alpha * self.n * (-self.alpha * p).powf(self.n - 1.0);
        let db = -m * w.powf(m - 1.0) * du / ((1.0 + u) * (1.0 + u));
        0.5 * dphi / phi.sqrt() * b * b + 2.0 * phi.sqrt() * b * db
    }
}

/// Linear storage `S(p) = storage·p` with constant mobility.
///
/// Not a physical retention curve; used for verification runs where the
/// linearization is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel {
    pub storage: f64,
    pub mobility: f64,
}

/// A retention/permeability law attached to one subdomain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstitutiveModel {
    PowerLaw(PowerLawModel),
    VanGenuchten(VanGenuchtenModel),
    Linear(LinearModel),
}

impl ConstitutiveModel {
    pub fn power_law(subdomain_index: u8) -> Result<Self> {
        PowerLawModel::new(subdomain_index).map(Self::PowerLaw)
    }

    pub fn linear(storage: f64, mobility: f64) -> Result<Self> {
        if !(storage >= 0.0) || !(mobility >= 0.0) {
            return Err(invalid(
                "linear model needs non-negative storage and mobility",
            ));
        }
        Ok(Self::Linear(LinearModel { storage, mobility }))
    }

    pub fn saturation(&self, p: f64) -> f64 {
        match self {
            Self::PowerLaw(m) => m.saturation(p),
            Self::VanGenuchten(m) => m.saturation(p),
            Self::Linear(m) => m.storage * p,
        }
    }

    /// `dS/dp`; zero in the saturated range and the left limit at `p = 0`.
    pub fn saturation_derivative(&self, p: f64) -> f64 {
        match self {
            Self::PowerLaw(m) => m.saturation_derivative(p),
            Self::VanGenuchten(m) => m.saturation_derivative(p),
            Self::Linear(m) => m.storage,
        }
    }

    /// `k(S(p))`, unscaled.
    pub fn rel_perm(&self, p: f64) -> f64 {
        match self {
            Self::PowerLaw(m) => m.rel_perm_of_saturation(m.saturation(p)),
            Self::VanGenuchten(m) => m.rel_perm(p),
            Self::Linear(_) => 1.0,
        }
    }

    /// `d k(S(p)) / dp`, unscaled.
    pub fn rel_perm_derivative(&self, p: f64) -> f64 {
        match self {
            Self::PowerLaw(m) => m.rel_perm_derivative(p),
            Self::VanGenuchten(m) => m.rel_perm_derivative(p),
            Self::Linear(_) => 0.0,
        }
    }

    /// Mobility entering the flux `F = -mobility ∇(p + z)`.
    pub fn mobility(&self, p: f64) -> f64 {
        match self {
            Self::PowerLaw(_) => self.rel_perm(p),
            Self::VanGenuchten(m) => m.mobility_scale * self.rel_perm(p),
            Self::Linear(m) => m.mobility,
        }
    }

    pub fn mobility_derivative(&self, p: f64) -> f64 {
        match self {
            Self::PowerLaw(_) => self.rel_perm_derivative(p),
            Self::VanGenuchten(m) => m.mobility_scale * self.rel_perm_derivative(p),
            Self::Linear(_) => 0.0,
        }
    }

    fn porosity(&self) -> f64 {
        match self {
            Self::VanGenuchten(m) => m.porosity,
            _ => 1.0,
        }
    }

    /// Water content held in a unit volume: porosity times saturation.
    pub fn storage(&self, p: f64) -> f64 {
        self.porosity() * self.saturation(p)
    }

    pub fn storage_derivative(&self, p: f64) -> f64 {
        self.porosity() * self.saturation_derivative(p)
    }
}

/// Lipschitz and boundedness constants of a material pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialBounds {
    /// Lipschitz constant of `S`.
    pub lipschitz_saturation: f64,
    /// Lipschitz constant of `k` as a function of `S`.
    pub lipschitz_rel_perm: f64,
    /// Lower bound `m > 0` of the mobility.
    pub mobility_lower: f64,
    /// Bound `M` on `|∇(p + z)|`.
    pub gradient_bound: f64,
}

impl MaterialBounds {
    pub fn new(
        lipschitz_saturation: f64,
        lipschitz_rel_perm: f64,
        mobility_lower: f64,
        gradient_bound: f64,
    ) -> Result<Self> {
        let b = Self {
            lipschitz_saturation,
            lipschitz_rel_perm,
            mobility_lower,
            gradient_bound,
        };
        for (name, v) in [
            ("L_S", lipschitz_saturation),
            ("L_k", lipschitz_rel_perm),
            ("m", mobility_lower),
            ("M", gradient_bound),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!(
                    "material bound {name} must be positive, got {v}"
                )));
            }
        }
        Ok(b)
    }
}

/// Largest time step for which the L-scheme decomposition is guaranteed to contract.
///
/// `τ_max = 2m / (L_k² M²) · (1/L_S - 1/(2L))`, defined only for `L > L_S/2`.
pub fn tau_max(bounds: &MaterialBounds, stabilization: f64) -> Result<f64> {
    let MaterialBounds {
        lipschitz_saturation: ls,
        lipschitz_rel_perm: lk,
        mobility_lower: m,
        gradient_bound: grad,
    } = *bounds;
    if !(stabilization > ls / 2.0) {
        return Err(Error::Constraint(format!(
            "stabilization L = {stabilization} must exceed L_S/2 = {}",
            ls / 2.0
        )));
    }
    let tau = 2.0 * m / (lk * lk * grad * grad) * (1.0 / ls - 1.0 / (2.0 * stabilization));
    if !(tau > 0.0) {
        return Err(Error::Constraint(format!(
            "time-step bound is not positive ({tau})"
        )));
    }
    Ok(tau)
}

/// Sampled check of monotonicity, Lipschitz continuity and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub saturation_monotone: bool,
    pub rel_perm_monotone: bool,
    /// Largest sampled difference quotient of `S` in `p`.
    pub lipschitz_saturation: f64,
    /// Largest sampled difference quotient of `k` in `S`.
    pub lipschitz_rel_perm: f64,
    /// Smallest sampled mobility.
    pub mobility_lower: f64,
    /// Set when the sampled mobility touches zero.
    pub mobility_degenerate: bool,
}

pub fn verify_assumptions(
    model: &ConstitutiveModel,
    p_min: f64,
    p_max: f64,
    n_samples: usize,
) -> Result<AssumptionReport> {
    if !(p_min < p_max) {
        return Err(invalid(format!("empty pressure range [{p_min}, {p_max}]")));
    }
    if n_samples < 2 {
        return Err(invalid("at least two samples are required"));
    }
    let step = (p_max - p_min) / (n_samples - 1) as f64;
    let samples: Vec<(f64, f64, f64, f64)> = (0..n_samples)
        .map(|i| {
            let p = if i + 1 == n_samples {
                p_max
            } else {
                p_min + i as f64 * step
            };
            (p, model.saturation(p), model.rel_perm(p), model.mobility(p))
        })
        .collect();

    let mut report = AssumptionReport {
        saturation_monotone: true,
        rel_perm_monotone: true,
        lipschitz_saturation: 0.0,
        lipschitz_rel_perm: 0.0,
        mobility_lower: f64::INFINITY,
        mobility_degenerate: false,
    };
    for w in samples.windows(2) {
        let (p0, s0, k0, _) = w[0];
        let (p1, s1, k1, _) = w[1];
        report.saturation_monotone &= s1 >= s0;
        report.rel_perm_monotone &= k1 >= k0;
        report.lipschitz_saturation = report.lipschitz_saturation.max((s1 - s0).abs() / (p1 - p0));
        if s1 != s0 {
            report.lipschitz_rel_perm =
                report.lipschitz_rel_perm.max(((k1 - k0) / (s1 - s0)).abs());
        }
    }
    for &(_, _, _, mob) in &samples {
        report.mobility_lower = report.mobility_lower.min(mob);
    }
    report.mobility_degenerate = !(report.mobility_lower > 0.0);
    Ok(report)
}
