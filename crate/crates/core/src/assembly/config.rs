use std::fmt;
use std::sync::Arc;

use crate::{Error, Point, Result};

pub type VectorField = Arc<dyn Fn(Point) -> Point + Send + Sync>;
/// Boundary traction data, evaluated at a point with the outward normal.
pub type TractionField = Arc<dyn Fn(Point, Point) -> Point + Send + Sync>;

/// Slip length `ε ∈ [0, ∞]`. Infinity is a legal value (perfect slip).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SlipLength(f64);

impl SlipLength {
    pub const INFINITE: SlipLength = SlipLength(f64::INFINITY);

    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::InvalidSlipLength(eps));
        }
        Ok(Self(eps))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for SlipLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcMode {
    NitscheGnbc,
    Substitution,
}

impl BcMode {
    pub fn name(self) -> &'static str {
        match self {
            BcMode::NitscheGnbc => "nitsche",
            BcMode::Substitution => "substitution",
        }
    }
}

/// Weights `(c_u, c_σ)` in `φ_u = ν + c_u ‖β‖ h + c_σ σ h²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `c_u = 1/6`, `c_σ = 1/12`, the values used for the published runs
    Experimental,
    /// `c_u = c_σ = 1`
    Analysis,
}

impl Regime {
    pub fn weights(self) -> (f64, f64) {
        match self {
            Regime::Experimental => (1.0 / 6.0, 1.0 / 12.0),
            Regime::Analysis => (1.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Experimental => "experimental",
            Regime::Analysis => "analysis",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CipConstants {
    pub gamma_beta: f64,
    pub gamma_u: f64,
    pub gamma_p: f64,
}

impl Default for CipConstants {
    fn default() -> Self {
        Self {
            gamma_beta: 0.01,
            gamma_u: 0.05 * 0.01,
            gamma_p: 0.01,
        }
    }
}

/// Ghost-penalty constants not shared with the CIP terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostConstants {
    pub gamma_sigma: f64,
    pub gamma_nu: f64,
}

impl Default for GhostConstants {
    fn default() -> Self {
        Self {
            gamma_sigma: 0.005,
            gamma_nu: 0.05,
        }
    }
}

#[derive(Clone)]
pub struct OseenConfig {
    pub nu: f64,
    pub sigma: f64,
    pub beta: VectorField,
    pub body_force: VectorField,
    pub slip_length: SlipLength,
    pub gamma_n: f64,
    pub gamma_t: f64,
    /// `+1` symmetric, `-1` antisymmetric adjoint-consistency terms
    pub zeta_u: f64,
    pub cip: CipConstants,
    pub gp: GhostConstants,
    /// factor on all ghost-penalty terms involving second derivatives
    pub second_order_gp_scale: f64,
    pub regime_weights: (f64, f64),
    pub bc_mode: BcMode,
    pub simplified_beta_stab: bool,
    pub g_dirichlet: VectorField,
    pub h_traction: TractionField,
    pub inflow_tol: f64,
}

impl fmt::Debug for OseenConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OseenConfig")
            .field("nu", &self.nu)
            .field("sigma", &self.sigma)
            .field("slip_length", &self.slip_length)
            .field("gamma_n", &self.gamma_n)
            .field("gamma_t", &self.gamma_t)
            .field("zeta_u", &self.zeta_u)
            .field("cip", &self.cip)
            .field("gp", &self.gp)
            .field("second_order_gp_scale", &self.second_order_gp_scale)
            .field("regime_weights", &self.regime_weights)
            .field("bc_mode", &self.bc_mode)
            .field("simplified_beta_stab", &self.simplified_beta_stab)
            .field("inflow_tol", &self.inflow_tol)
            .finish_non_exhaustive()
    }
}

impl OseenConfig {
    /// Default parameters for polynomial order `order`, with zero data
    /// fields. `ν = σ = 1`, `1/γⁿ = 1/γᵗ = 10`, symmetric adjoint terms, slip
    /// length 1.
    pub fn new(order: usize) -> Self {
        let zero: VectorField = Arc::new(|_| Point::zeros());
        Self {
            nu: 1.0,
            sigma: 1.0,
            beta: zero.clone(),
            body_force: zero.clone(),
            slip_length: SlipLength(1.0),
            gamma_n: 0.1,
            gamma_t: 0.1,
            zeta_u: 1.0,
            cip: CipConstants::default(),
            gp: GhostConstants::default(),
            second_order_gp_scale: 0.05,
            regime_weights: Regime::Experimental.weights(),
            bc_mode: BcMode::NitscheGnbc,
            simplified_beta_stab: order == 2,
            g_dirichlet: zero,
            h_traction: Arc::new(|_, _| Point::zeros()),
            inflow_tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return bad("viscosity must be positive");
        }
        if !(self.sigma >= 0.0) {
            return bad("reaction coefficient must be nonnegative");
        }
        if !(self.gamma_n > 0.0 && self.gamma_t > 0.0) {
            return bad("Nitsche parameters must be positive");
        }
        if self.zeta_u != 1.0 && self.zeta_u != -1.0 {
            return bad("adjoint flag must be +1 or -1");
        }
        let (cu, cs) = self.regime_weights;
        if !(cu >= 0.0 && cs >= 0.0) {
            return bad("regime weights must be nonnegative");
        }
        if self.bc_mode == BcMode::Substitution && self.slip_length.value() == 0.0 {
            return Err(Error::InvalidSlipLength(0.0));
        }
        Ok(())
    }
}
