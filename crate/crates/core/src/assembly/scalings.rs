use crate::assembly::config::{OseenConfig, SlipLength};
use crate::fem_basis::{shape_eval, FunctionSpace};
use crate::mesh::{ActiveMesh, Facet};
use crate::quadrature::gauss_square;
use crate::{Point, Result};

/// Flow-regime dependent stabilization scalings.
#[derive(Debug, Clone)]
pub struct StabilizationScalings {
    pub h: f64,
    /// per background element; zero on inactive elements
    pub phi_u: Vec<f64>,
    pub phi_beta: Vec<f64>,
    pub phi_p: Vec<f64>,
    /// `‖β‖_{0,∞,T}` per background element
    pub beta_inf: Vec<f64>,
    /// `β` at the space nodes (nodal interpolant coefficients)
    pub beta_nodes: Vec<Point>,
    pub omega_h: f64,
    pub capital_phi: f64,
    pub poincare_c: f64,
}

impl StabilizationScalings {
    pub fn facet_phi_u(&self, f: &Facet) -> f64 {
        self.phi_u[f.left].max(self.phi_u[f.right])
    }

    pub fn facet_phi_beta(&self, f: &Facet) -> f64 {
        self.phi_beta[f.left].max(self.phi_beta[f.right])
    }

    pub fn facet_phi_p(&self, f: &Facet) -> f64 {
        self.phi_p[f.left].max(self.phi_p[f.right])
    }

    pub fn facet_beta_inf(&self, f: &Facet) -> f64 {
        self.beta_inf[f.left].max(self.beta_inf[f.right])
    }

    /// Facet weight `‖β‖²_{∞,F} φ_β,F` of the simplified streamline terms.
    pub fn facet_phi_beta_bar(&self, f: &Facet) -> f64 {
        self.facet_beta_inf(f).powi(2) * self.facet_phi_beta(f)
    }
}

/// `φ_u = ν + c_u ‖β‖ h + c_σ σ h²`.
pub fn phi_u(nu: f64, sigma: f64, beta_inf: f64, h: f64, weights: (f64, f64)) -> f64 {
    nu + weights.0 * beta_inf * h + weights.1 * sigma * h * h
}

pub fn compute_scalings(config: &OseenConfig, mesh: &ActiveMesh, space: &FunctionSpace) -> Result<StabilizationScalings> {
    let h = mesh.h();
    let n_el = mesh.background.elements.len();
    let k = space.order;
    let rule = gauss_square(2 * k + 2)?;
    let beta_nodes: Vec<Point> = space.node_coords.iter().map(|&x| (config.beta)(x)).collect();

    let mut out = StabilizationScalings {
        h,
        phi_u: vec![0.0; n_el],
        phi_beta: vec![0.0; n_el],
        phi_p: vec![0.0; n_el],
        beta_inf: vec![0.0; n_el],
        beta_nodes,
        omega_h: 0.0,
        capital_phi: 0.0,
        poincare_c: mesh.domain.diameter(),
    };

    let mut beta_grad_max = 0.0f64;
    for &e in &mesh.active_elements {
        let map = mesh.background.map(e);
        let mut b = space.dof_map[e]
            .iter()
            .map(|&n| out.beta_nodes[n].norm())
            .fold(0.0f64, f64::max);
        for &xi in &rule.points {
            b = b.max((config.beta)(map.to_physical(xi)).norm());
            let s = shape_eval(k, xi, &map);
            let mut grad = crate::Mat2::zeros();
            for (a, &n) in space.dof_map[e].iter().enumerate() {
                grad += out.beta_nodes[n] * s.grads[a].transpose();
            }
            beta_grad_max = beta_grad_max.max(grad.norm());
        }
        out.beta_inf[e] = b;
        let pu = phi_u(config.nu, config.sigma, b, h, config.regime_weights);
        out.phi_u[e] = pu;
        out.phi_beta[e] = h * h / pu;
        out.phi_p[e] = h * h / pu;
    }

    let (nu, sigma, cp) = (config.nu, config.sigma, out.poincare_c);
    let beta_max = out.beta_inf.iter().copied().fold(0.0, f64::max);
    out.omega_h = h * h * beta_grad_max / (nu + sigma * h * h);
    let inv_phi = sigma * cp * cp + beta_max * cp + nu + (beta_max * cp / (nu + sigma * cp * cp).sqrt()).powi(2);
    out.capital_phi = 1.0 / inv_phi;
    Ok(out)
}

/// Weights of the tangential boundary terms for slip length `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentialWeights {
    pub w_eps: f64,
    pub w_gamma: f64,
    pub penalty: f64,
}

pub fn tangential_weights(eps: SlipLength, gamma_t: f64, h: f64, nu: f64) -> TangentialWeights {
    let gh = gamma_t * h;
    if eps.is_infinite() {
        return TangentialWeights {
            w_eps: 1.0,
            w_gamma: 0.0,
            penalty: 0.0,
        };
    }
    let e = eps.value();
    let w_gamma = gh / (e + gh);
    TangentialWeights {
        w_eps: 1.0 - w_gamma,
        w_gamma,
        penalty: nu / (e + gh),
    }
}
