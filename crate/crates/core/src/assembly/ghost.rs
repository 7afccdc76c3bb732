use super::cip::{add_componentwise, add_pressure, add_vector, assemble_facets, beta_h};
use super::{Contributions, Local, OseenConfig, StabilizationScalings};
use crate::fem_basis::FunctionSpace;
use crate::mesh::{ActiveMesh, Facet};
use crate::{Point, Result};

/// Ghost penalty on the facets of cut elements, penalizing jumps of normal
/// derivatives up to the polynomial order.
pub fn assemble_ghost_penalty(
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
) -> Result<Contributions> {
    let k = space.order;
    let h = scalings.h;
    let (nu, sigma) = (config.nu, config.sigma);
    let (gs, gn) = (config.gp.gamma_sigma, config.gp.gamma_nu);
    let c = config.cip;
    let s2 = config.second_order_gp_scale;
    let facets: Vec<&Facet> = mesh.ghost_facet_iter().collect();
    assemble_facets(&facets, mesh, space, |trace, samples| {
        let facet = trace.facet;
        let n = facet.normal;
        let mut local = Local::new(&samples[0].jumps.nodes);
        let phi_u = scalings.facet_phi_u(facet);
        let phi_b = scalings.facet_phi_beta(facet);
        let phi_p = scalings.facet_phi_p(facet);
        let phi_b_bar = scalings.facet_phi_beta_bar(facet);
        for q in samples {
            let (w, jumps) = (q.weight, &q.jumps);
            for j in 1..=k {
                let d = jumps.normal_derivative(j, n);
                let scale = if j == 2 { s2 } else { 1.0 };
                let hp = h.powi(2 * j as i32 - 1);
                let hm = h.powi(2 * j as i32 + 1);
                add_componentwise(&mut local, &d, w * scale * (gs * sigma * hm + gn * nu * hp));
                add_pressure(&mut local, &d, w * scale * c.gamma_p * phi_p * hp);
                if config.simplified_beta_stab {
                    add_componentwise(&mut local, &d, w * scale * c.gamma_beta * phi_b_bar * hp);
                }
            }
            if !config.simplified_beta_stab {
                let beta = beta_h(space, scalings, trace, q.point);
                for j in 0..k {
                    let scale = if j == 1 { s2 } else { 1.0 };
                    let hm = h.powi(2 * j as i32 + 1);
                    // gradient of the j-th normal derivative of each basis jump
                    let grad_j: Vec<Point> = match j {
                        0 => jumps.grad.clone(),
                        _ => jumps.hess.iter().map(|hs| hs * n).collect(),
                    };
                    let streamline: Vec<f64> = grad_j.iter().map(|g| beta.dot(g)).collect();
                    add_componentwise(&mut local, &streamline, w * scale * c.gamma_beta * phi_b * hm);
                    add_vector(&mut local, &grad_j, w * scale * c.gamma_u * phi_u * hm);
                }
            }
        }
        local
    })
}
