use super::{assemble_elements, volume_order, Contributions, Local, OseenConfig, P};
use crate::fem_basis::{shape_eval, FunctionSpace};
use crate::mesh::ActiveMesh;
use crate::quadrature::cut_volume_rule;
use crate::Result;

/// Volume terms over `T ∩ Ω`: reaction, advection, viscous strain, the
/// pressure-velocity coupling and the body force.
pub fn assemble_bulk(config: &OseenConfig, mesh: &ActiveMesh, space: &FunctionSpace) -> Result<Contributions> {
    let k = space.order;
    let (nu, sigma) = (config.nu, config.sigma);
    assemble_elements(mesh, space, |idx, e| {
        let map = mesh.background.map(e);
        let rule = cut_volume_rule(&mesh.cells[idx], volume_order(k), &map, mesh.is_cut(e))?;
        let nodes = &space.dof_map[e];
        let m = nodes.len();
        let mut local = Local::new(nodes);
        for q in 0..rule.len() {
            let x = rule.points[q];
            let w = rule.weights[q];
            let s = shape_eval(k, rule.reference[q], &map);
            let beta = (config.beta)(x);
            let f = (config.body_force)(x);
            let adv: Vec<f64> = s.grads.iter().map(|g| beta.dot(g)).collect();
            for a in 0..m {
                let (na, ga) = (s.values[a], s.grads[a]);
                for b in 0..m {
                    let (nb, gb) = (s.values[b], s.grads[b]);
                    let diag = w * (sigma * na * nb + na * adv[b] + nu * ga.dot(&gb));
                    for i in 0..2 {
                        local.add(a, i, b, i, diag);
                        for j in 0..2 {
                            local.add(a, i, b, j, w * nu * gb[i] * ga[j]);
                        }
                        local.add(a, i, b, P, -w * nb * ga[i]);
                        local.add(a, P, b, i, w * na * gb[i]);
                    }
                }
                local.add_rhs(a, 0, w * f.x * na);
                local.add_rhs(a, 1, w * f.y * na);
            }
        }
        Ok(Some(local))
    })
}
