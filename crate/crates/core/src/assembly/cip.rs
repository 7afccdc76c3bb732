use rayon::prelude::*;

use super::{facet_order, Contributions, Local, OseenConfig, StabilizationScalings, P};
use crate::fem_basis::{shape_eval, FacetJumps, FacetTrace, FunctionSpace};
use crate::mesh::{ActiveMesh, Facet};
use crate::quadrature::facet_rule;
use crate::{Point, Result};

/// Nodal interpolant `β_h` evaluated from the left element of a facet.
pub(crate) fn beta_h(space: &FunctionSpace, scalings: &StabilizationScalings, trace: &FacetTrace, x: Point) -> Point {
    let e = trace.facet.left;
    let s = shape_eval(space.order, trace.left_map.to_reference(x), &trace.left_map);
    space.dof_map[e]
        .iter()
        .zip(&s.values)
        .map(|(&n, &v)| v * scalings.beta_nodes[n])
        .sum()
}

/// Adds `c · Σ_i [X_i(u)] [X_i(v)]` for a scalar jump quantity `d` applied
/// to each velocity component separately.
pub(crate) fn add_componentwise(local: &mut Local, d: &[f64], c: f64) {
    for a in 0..d.len() {
        for b in 0..d.len() {
            let v = c * d[a] * d[b];
            local.add(a, 0, b, 0, v);
            local.add(a, 1, b, 1, v);
        }
    }
}

/// Adds `c · [X(u)] [X(v)]` where `X(N e_j) = d[b][j]` (divergence-type).
pub(crate) fn add_vector(local: &mut Local, d: &[Point], c: f64) {
    for a in 0..d.len() {
        for b in 0..d.len() {
            for i in 0..2 {
                for j in 0..2 {
                    local.add(a, i, b, j, c * d[a][i] * d[b][j]);
                }
            }
        }
    }
}

pub(crate) fn add_pressure(local: &mut Local, d: &[f64], c: f64) {
    for a in 0..d.len() {
        for b in 0..d.len() {
            local.add(a, P, b, P, c * d[a] * d[b]);
        }
    }
}

pub(crate) struct FacetSample {
    pub weight: f64,
    pub point: Point,
    pub jumps: FacetJumps,
}

/// Runs `f` over the given facets in parallel and accumulates in order.
pub(crate) fn assemble_facets<F>(
    facets: &[&Facet],
    mesh: &ActiveMesh,
    space: &FunctionSpace,
    f: F,
) -> Result<Contributions>
where
    F: Fn(&FacetTrace, &[FacetSample]) -> Local + Sync,
{
    let k = space.order;
    let locals: Vec<Local> = facets
        .par_iter()
        .map(|facet| {
            let trace = FacetTrace::new(space, mesh, facet);
            let rule = facet_rule(facet.a, facet.b, facet_order(k))?;
            let samples: Vec<FacetSample> = (0..rule.params.len())
                .map(|q| FacetSample {
                    weight: rule.weights[q],
                    point: rule.points[q],
                    jumps: trace.jumps(rule.params[q]),
                })
                .collect();
            Ok(f(&trace, &samples))
        })
        .collect::<Result<_>>()?;
    let mut out = Contributions::for_space(space);
    for l in &locals {
        out.scatter(l);
    }
    Ok(out)
}

/// Continuous interior penalty over all interior facets.
pub fn assemble_cip(
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
) -> Result<Contributions> {
    let h = scalings.h;
    let c = config.cip;
    let facets: Vec<&Facet> = mesh.interior_facets.iter().collect();
    assemble_facets(&facets, mesh, space, |trace, samples| {
        let facet = trace.facet;
        let n = facet.normal;
        let mut local = Local::new(&samples[0].jumps.nodes);
        let phi_u = scalings.facet_phi_u(facet);
        let phi_b = scalings.facet_phi_beta(facet);
        let phi_p = scalings.facet_phi_p(facet);
        for q in samples {
            let (w, jumps) = (q.weight, &q.jumps);
            let dn = jumps.normal_derivative(1, n);
            if config.simplified_beta_stab {
                add_componentwise(&mut local, &dn, w * c.gamma_beta * scalings.facet_phi_beta_bar(facet) * h);
            } else {
                let beta = beta_h(space, scalings, trace, q.point);
                let streamline: Vec<f64> = jumps.grad.iter().map(|g| beta.dot(g)).collect();
                add_componentwise(&mut local, &streamline, w * c.gamma_beta * phi_b * h);
                add_vector(&mut local, &jumps.grad, w * c.gamma_u * phi_u * h);
            }
            add_pressure(&mut local, &dn, w * c.gamma_p * phi_p * h);
        }
        local
    })
}
