//! Assembly of the stabilized Oseen system
//! `A_h + S_h + G_h = L_h` on the active mesh.
//!
//! Element and facet contributions are computed independently (in parallel)
//! as dense local blocks and accumulated serially in a fixed order, so the
//! assembled system is bit-reproducible.

pub mod boundary;
pub mod bulk;
pub mod cip;
pub mod config;
pub mod ghost;
pub mod scalings;

use rayon::prelude::*;

use crate::fem_basis::{FunctionSpace, FIELDS_PER_NODE};
use crate::mesh::ActiveMesh;
use crate::quadrature::cut_volume_rule;
use crate::sparse::{CsrMatrix, Triplets};
use crate::{Point, Result};

pub use boundary::{assemble_boundary, assemble_nitsche_gnbc, assemble_nitsche_gnbc_with_weights, assemble_substitution};
pub use bulk::assemble_bulk;
pub use cip::assemble_cip;
pub use config::{BcMode, CipConstants, GhostConstants, OseenConfig, Regime, SlipLength, TractionField, VectorField};
pub use ghost::assemble_ghost_penalty;
pub use scalings::{compute_scalings, tangential_weights, StabilizationScalings, TangentialWeights};

pub const U1: usize = 0;
pub const U2: usize = 1;
pub const P: usize = 2;

/// Bulk and boundary quadrature order: products of two `Q_k` functions
/// have total degree `4k`; two more orders absorb the non-polynomial data.
pub fn volume_order(k: usize) -> usize {
    4 * k + 2
}

/// Quadrature order on interior facets.
pub fn facet_order(k: usize) -> usize {
    2 * k + 2
}

/// Unassembled matrix and right-hand side contributions over the full
/// system dimension (field unknowns plus the pressure-mean multiplier).
#[derive(Debug, Clone)]
pub struct Contributions {
    pub triplets: Triplets,
    pub rhs: Vec<f64>,
}

impl Contributions {
    pub fn new(dim: usize) -> Self {
        Self {
            triplets: Triplets::new(dim, dim),
            rhs: vec![0.0; dim],
        }
    }

    pub fn for_space(space: &FunctionSpace) -> Self {
        Self::new(system_dim(space))
    }

    pub fn add(&mut self, other: Contributions) {
        self.triplets.extend(other.triplets);
        for (a, b) in self.rhs.iter_mut().zip(other.rhs) {
            *a += b;
        }
    }

    pub fn matrix(&self) -> CsrMatrix {
        self.triplets.to_csr()
    }

    pub(crate) fn scatter(&mut self, local: &Local) {
        let n = local.dofs.len();
        for (r, &gr) in local.dofs.iter().enumerate() {
            self.rhs[gr] += local.rhs[r];
            for (c, &gc) in local.dofs.iter().enumerate() {
                self.triplets.push(gr, gc, local.mat[r * n + c]);
            }
        }
    }
}

pub fn system_dim(space: &FunctionSpace) -> usize {
    space.n_field_dofs() + 1
}

/// Dense block over the three fields of a list of nodes. Local index of
/// field `c` at node position `a` is `3a + c`.
#[derive(Debug, Clone)]
pub(crate) struct Local {
    pub dofs: Vec<usize>,
    pub mat: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl Local {
    pub fn new(nodes: &[usize]) -> Self {
        let dofs: Vec<usize> = nodes
            .iter()
            .flat_map(|&n| (0..FIELDS_PER_NODE).map(move |c| FIELDS_PER_NODE * n + c))
            .collect();
        let n = dofs.len();
        Self {
            dofs,
            mat: vec![0.0; n * n],
            rhs: vec![0.0; n],
        }
    }

    #[inline]
    pub fn add(&mut self, a: usize, i: usize, b: usize, j: usize, v: f64) {
        let n = self.dofs.len();
        self.mat[(3 * a + i) * n + 3 * b + j] += v;
    }

    #[inline]
    pub fn add_rhs(&mut self, a: usize, i: usize, v: f64) {
        self.rhs[3 * a + i] += v;
    }
}

/// Runs `f` over every active element in parallel and accumulates in
/// element order. `f` receives the position in `active_elements` and the
/// element id.
pub(crate) fn assemble_elements<F>(mesh: &ActiveMesh, space: &FunctionSpace, f: F) -> Result<Contributions>
where
    F: Fn(usize, usize) -> Result<Option<Local>> + Sync,
{
    let locals: Vec<Option<Local>> = mesh
        .active_elements
        .par_iter()
        .enumerate()
        .map(|(idx, &e)| f(idx, e))
        .collect::<Result<_>>()?;
    let mut out = Contributions::for_space(space);
    for l in locals.iter().flatten() {
        out.scatter(l);
    }
    Ok(out)
}

/// Row and column coupling the pressure unknowns to the mean-value
/// multiplier: `∫_Ω p dx = 0`.
pub fn assemble_pressure_constraint(mesh: &ActiveMesh, space: &FunctionSpace) -> Result<Contributions> {
    let k = space.order;
    let weights: Vec<Vec<(usize, f64)>> = mesh
        .active_elements
        .par_iter()
        .enumerate()
        .map(|(idx, &e)| {
            let map = mesh.background.map(e);
            let rule = cut_volume_rule(&mesh.cells[idx], volume_order(k), &map, mesh.is_cut(e))?;
            let nodes = &space.dof_map[e];
            let mut w = vec![0.0; nodes.len()];
            for (&xi, &wq) in rule.reference.iter().zip(&rule.weights) {
                let s = crate::fem_basis::shape_eval(k, xi, &map);
                for a in 0..nodes.len() {
                    w[a] += wq * s.values[a];
                }
            }
            Ok(nodes.iter().copied().zip(w).collect())
        })
        .collect::<Result<_>>()?;
    let mut out = Contributions::for_space(space);
    let lm = space.n_field_dofs();
    for el in weights {
        for (node, w) in el {
            let d = space.dof(node, P);
            out.triplets.push(lm, d, w);
            out.triplets.push(d, lm, w);
        }
    }
    Ok(out)
}

/// Assembled linear system. The last unknown is the pressure-mean
/// multiplier.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub velocity_dofs: Vec<usize>,
    pub pressure_dofs: Vec<usize>,
    pub multiplier: usize,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}

pub fn assemble_system(config: &OseenConfig, mesh: &ActiveMesh, space: &FunctionSpace) -> Result<AssembledSystem> {
    config.validate()?;
    let scalings = compute_scalings(config, mesh, space)?;
    let mut total = assemble_bulk(config, mesh, space)?;
    total.add(assemble_boundary(config, &scalings, mesh, space)?);
    total.add(assemble_cip(config, &scalings, mesh, space)?);
    total.add(assemble_ghost_penalty(config, &scalings, mesh, space)?);
    total.add(assemble_pressure_constraint(mesh, space)?);
    Ok(finish(total, space))
}

/// Compresses accumulated contributions into an [`AssembledSystem`].
pub fn finish(total: Contributions, space: &FunctionSpace) -> AssembledSystem {
    let n = space.n_nodes();
    AssembledSystem {
        matrix: total.matrix(),
        rhs: total.rhs,
        velocity_dofs: (0..n).flat_map(|a| [space.dof(a, U1), space.dof(a, U2)]).collect(),
        pressure_dofs: (0..n).map(|a| space.dof(a, P)).collect(),
        multiplier: space.n_field_dofs(),
    }
}

/// Unit vector `e_i`.
#[inline]
pub(crate) fn unit(i: usize) -> Point {
    if i == 0 {
        Point::new(1.0, 0.0)
    } else {
        Point::new(0.0, 1.0)
    }
}
