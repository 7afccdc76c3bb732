use super::{
    assemble_elements, tangential_weights, unit, volume_order, BcMode, Contributions, Local, OseenConfig,
    StabilizationScalings, TangentialWeights, P,
};
use crate::cut_geometry::projectors_at;
use crate::fem_basis::{shape_eval, FunctionSpace};
use crate::mesh::ActiveMesh;
use crate::quadrature::boundary_rule;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy)]
enum Tangential {
    /// Nitsche imposition of the general Navier condition
    Nitsche(TangentialWeights),
    /// traction replaced by the Robin relation with coefficient `ν/ε`
    Robin(f64),
}

/// Boundary terms for the configured [`BcMode`].
pub fn assemble_boundary(
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
) -> Result<Contributions> {
    match config.bc_mode {
        BcMode::NitscheGnbc => assemble_nitsche_gnbc(config, scalings, mesh, space),
        BcMode::Substitution => assemble_substitution(config, scalings, mesh, space),
    }
}

pub fn assemble_nitsche_gnbc(
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
) -> Result<Contributions> {
    let w = tangential_weights(config.slip_length, config.gamma_t, scalings.h, config.nu);
    assemble_nitsche_gnbc_with_weights(config, scalings, mesh, space, w)
}

/// Same as [`assemble_nitsche_gnbc`] with explicitly supplied tangential
/// weights.
pub fn assemble_nitsche_gnbc_with_weights(
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
    weights: TangentialWeights,
) -> Result<Contributions> {
    assemble_with(config, scalings, mesh, space, Tangential::Nitsche(weights))
}

pub fn assemble_substitution(
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
) -> Result<Contributions> {
    let eps = config.slip_length;
    if eps.value() == 0.0 {
        return Err(Error::InvalidSlipLength(0.0));
    }
    let robin = if eps.is_infinite() { 0.0 } else { config.nu / eps.value() };
    assemble_with(config, scalings, mesh, space, Tangential::Robin(robin))
}

fn assemble_with(
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
    tangential: Tangential,
) -> Result<Contributions> {
    let k = space.order;
    let h = scalings.h;
    let nu = config.nu;
    let zeta = config.zeta_u;
    let dirichlet = config.slip_length.value() == 0.0;
    assemble_elements(mesh, space, |idx, e| {
        let cell = &mesh.cells[idx];
        if cell.boundary_segments.is_empty() {
            return Ok(None);
        }
        let map = mesh.background.map(e);
        let nodes = &space.dof_map[e];
        let m = nodes.len();
        let mut local = Local::new(nodes);
        let normal_penalty = (nu + scalings.phi_u[e]) / (config.gamma_n * h);

        for seg in &cell.boundary_segments {
            let n = seg.normal;
            let proj = projectors_at(n)?;
            let pt = proj.tangential;
            let rule = boundary_rule(seg, volume_order(k))?;
            for q in 0..rule.points.len() {
                let x = rule.points[q];
                let w = rule.weights[q];
                let s = shape_eval(k, map.to_reference(x), &map);
                let g = (config.g_dirichlet)(x);
                let gn = g.dot(&n);
                let traction = (config.h_traction)(x, n);
                let beta_n = (config.beta)(x).dot(&n);
                let beta_norm = (config.beta)(x).norm();
                let inflow = dirichlet && beta_n < -config.inflow_tol * beta_norm;

                let dn: Vec<f64> = s.grads.iter().map(|g| g.dot(&n)).collect();
                // viscous traction 2νε(N e_j)n
                let trac = |a: usize, j: usize| -> Point { nu * (dn[a] * unit(j) + n[j] * s.grads[a]) };

                for a in 0..m {
                    let na = s.values[a];
                    let ta = [trac(a, 0), trac(a, 1)];
                    for b in 0..m {
                        let nb = s.values[b];
                        for j in 0..2 {
                            let tb = trac(b, j);
                            let ptb = pt * tb;
                            for i in 0..2 {
                                let mut v = 0.0;
                                // normal Nitsche terms
                                v -= zeta * nb * n[j] * 2.0 * nu * n[i] * dn[a];
                                v += normal_penalty * nb * n[j] * na * n[i];
                                match tangential {
                                    Tangential::Nitsche(tw) => {
                                        v -= tb[i] * na;
                                        v += tw.w_eps * ptb[i] * na;
                                        v += tw.penalty * nb * pt[(j, i)] * na;
                                        if tw.w_eps != 0.0 {
                                            v -= zeta * config.gamma_t * h * tw.w_eps * ptb.dot(&ta[i]) / nu;
                                        }
                                        v -= zeta * tw.w_gamma * nb * (pt * unit(j)).dot(&ta[i]);
                                        if inflow && i == j {
                                            v -= beta_n * nb * na;
                                        }
                                    }
                                    Tangential::Robin(r) => {
                                        v -= tb.dot(&n) * n[i] * na;
                                        v += r * nb * pt[(j, i)] * na;
                                    }
                                }
                                local.add(a, i, b, j, w * v);
                            }
                            local.add(a, P, b, j, -w * na * nb * n[j]);
                        }
                        for i in 0..2 {
                            local.add(a, i, b, P, w * nb * na * n[i]);
                        }
                    }

                    let pth = pt * traction;
                    let ptg = pt * g;
                    for i in 0..2 {
                        let mut r = -zeta * gn * 2.0 * nu * n[i] * dn[a];
                        r += normal_penalty * gn * na * n[i];
                        match tangential {
                            Tangential::Nitsche(tw) => {
                                r += tw.w_eps * pth[i] * na + tw.penalty * ptg[i] * na;
                                if tw.w_eps != 0.0 {
                                    r -= zeta * config.gamma_t * h * tw.w_eps * pth.dot(&ta[i]) / nu;
                                }
                                r -= zeta * tw.w_gamma * ptg.dot(&ta[i]);
                                if inflow {
                                    r -= beta_n * g[i] * na;
                                }
                            }
                            Tangential::Robin(rc) => {
                                r += (pth[i] + rc * ptg[i]) * na;
                            }
                        }
                        local.add_rhs(a, i, w * r);
                    }
                    local.add_rhs(a, P, -w * gn * na);
                }
            }
        }
        Ok(Some(local))
    })
}
