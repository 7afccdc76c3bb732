//! Continuous equal-order `Q1`/`Q2` Lagrange spaces on the active mesh.
//!
//! Degrees of freedom live on a lattice of `(kN + 1)^2` points of the
//! background grid; only points touched by active elements are numbered.
//! Unknowns are interleaved per node as `(u1, u2, p)`.

use crate::mesh::{ActiveMesh, ElementMap, Facet};
use crate::{Error, Mat2, Point, Result};

pub const FIELDS_PER_NODE: usize = 3;

/// 1D Lagrange basis on `[-1, 1]` with equispaced nodes: values, first and
/// second derivatives.
fn lagrange_1d(order: usize, x: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    match order {
        1 => (
            [0.5 * (1.0 - x), 0.5 * (1.0 + x), 0.0],
            [-0.5, 0.5, 0.0],
            [0.0, 0.0, 0.0],
        ),
        2 => (
            [0.5 * x * (x - 1.0), 1.0 - x * x, 0.5 * x * (x + 1.0)],
            [x - 0.5, -2.0 * x, x + 0.5],
            [1.0, -2.0, 1.0],
        ),
        _ => unreachable!("basis order is validated on construction"),
    }
}

/// Shape functions of one element evaluated at a point, with derivatives in
/// physical coordinates.
#[derive(Debug, Clone)]
pub struct ShapeValues {
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
    pub hessians: Vec<Mat2>,
}

/// Evaluates the tensor Lagrange basis of order `order` at reference point
/// `xi`. Local numbering is `a + (k + 1) b` for 1D indices `a` (along `ξ`)
/// and `b` (along `η`).
pub fn shape_eval(order: usize, xi: Point, map: &ElementMap) -> ShapeValues {
    let (vx, dx, ddx) = lagrange_1d(order, xi.x);
    let (vy, dy, ddy) = lagrange_1d(order, xi.y);
    let m = order + 1;
    let s = 1.0 / map.half_h;
    let rot = Mat2::new(map.cos, -map.sin, map.sin, map.cos);
    let rot_t = rot.transpose();
    let mut out = ShapeValues {
        values: Vec::with_capacity(m * m),
        grads: Vec::with_capacity(m * m),
        hessians: Vec::with_capacity(m * m),
    };
    for b in 0..m {
        for a in 0..m {
            out.values.push(vx[a] * vy[b]);
            let g_ref = Point::new(dx[a] * vy[b], vx[a] * dy[b]);
            out.grads.push(s * (rot * g_ref));
            let h_ref = Mat2::new(ddx[a] * vy[b], dx[a] * dy[b], dx[a] * dy[b], vx[a] * ddy[b]);
            out.hessians.push(s * s * (rot * h_ref * rot_t));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct FunctionSpace {
    pub order: usize,
    /// per background element, global node ids in local order (empty for
    /// inactive elements)
    pub dof_map: Vec<Vec<usize>>,
    pub node_coords: Vec<Point>,
    lattice_side: usize,
}

impl FunctionSpace {
    pub fn new(mesh: &ActiveMesh, order: usize) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(Error::InvalidConfig(format!("basis order must be 1 or 2, got {order}")));
        }
        let bg = &mesh.background;
        let side = order * bg.n_per_side + 1;
        let mut lattice_to_node = vec![usize::MAX; side * side];
        let mut dof_map = vec![Vec::new(); bg.elements.len()];
        let mut node_coords = Vec::new();

        // number lattice points in increasing lattice order
        let mut used = vec![false; side * side];
        for &e in &mesh.active_elements {
            let (i, j) = bg.element_ij(e);
            for b in 0..=order {
                for a in 0..=order {
                    used[(order * i + a) + side * (order * j + b)] = true;
                }
            }
        }
        let (s, c) = bg.rotation.sin_cos();
        let step = bg.h / order as f64;
        for (l, _) in used.iter().enumerate().filter(|(_, &u)| u) {
            lattice_to_node[l] = node_coords.len();
            let x = -bg.half_extent + (l % side) as f64 * step;
            let y = -bg.half_extent + (l / side) as f64 * step;
            node_coords.push(Point::new(c * x - s * y, s * x + c * y));
        }
        for &e in &mesh.active_elements {
            let (i, j) = bg.element_ij(e);
            let mut nodes = Vec::with_capacity((order + 1) * (order + 1));
            for b in 0..=order {
                for a in 0..=order {
                    nodes.push(lattice_to_node[(order * i + a) + side * (order * j + b)]);
                }
            }
            dof_map[e] = nodes;
        }
        Ok(Self {
            order,
            dof_map,
            node_coords,
            lattice_side: side,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.node_coords.len()
    }

    /// Number of scalar basis functions (per field).
    pub fn n_scalar_dofs(&self) -> usize {
        self.node_coords.len()
    }

    /// Velocity and pressure unknowns, without the pressure-mean multiplier.
    pub fn n_field_dofs(&self) -> usize {
        FIELDS_PER_NODE * self.n_nodes()
    }

    pub fn dof(&self, node: usize, field: usize) -> usize {
        FIELDS_PER_NODE * node + field
    }

    pub fn lattice_side(&self) -> usize {
        self.lattice_side
    }

    /// Nodal interpolant of `(u1, u2, p)`.
    pub fn interpolate(&self, f: impl Fn(Point) -> [f64; 3]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_field_dofs()];
        for (n, &x) in self.node_coords.iter().enumerate() {
            let v = f(x);
            for c in 0..FIELDS_PER_NODE {
                out[self.dof(n, c)] = v[c];
            }
        }
        out
    }

    /// Value, gradient and Hessian of field `field` of `coeffs` on element
    /// `e` at reference point `xi`.
    pub fn eval_field(&self, coeffs: &[f64], e: usize, field: usize, shapes: &ShapeValues) -> (f64, Point, Mat2) {
        let mut v = 0.0;
        let mut g = Point::zeros();
        let mut hs = Mat2::zeros();
        for (a, &node) in self.dof_map[e].iter().enumerate() {
            let c = coeffs[self.dof(node, field)];
            v += c * shapes.values[a];
            g += c * shapes.grads[a];
            hs += c * shapes.hessians[a];
        }
        (v, g, hs)
    }
}

/// Jumps `left - right` of the basis functions of the two elements sharing
/// a facet, evaluated at one facet point.
#[derive(Debug, Clone)]
pub struct FacetJumps {
    /// union of the node ids of both elements
    pub nodes: Vec<usize>,
    pub value: Vec<f64>,
    pub grad: Vec<Point>,
    pub hess: Vec<Mat2>,
}

impl FacetJumps {
    /// Jump of `(n·∇)^j N` for each union node.
    pub fn normal_derivative(&self, j: usize, n: Point) -> Vec<f64> {
        match j {
            0 => self.value.clone(),
            1 => self.grad.iter().map(|g| g.dot(&n)).collect(),
            2 => self.hess.iter().map(|h| n.dot(&(h * n))).collect(),
            _ => unreachable!("order checked by caller"),
        }
    }
}

/// Trace of the space on an interior facet.
#[derive(Debug, Clone)]
pub struct FacetTrace<'a> {
    pub facet: &'a Facet,
    pub left_map: ElementMap,
    pub right_map: ElementMap,
    space: &'a FunctionSpace,
}

impl<'a> FacetTrace<'a> {
    pub fn new(space: &'a FunctionSpace, mesh: &ActiveMesh, facet: &'a Facet) -> Self {
        Self {
            facet,
            left_map: mesh.background.map(facet.left),
            right_map: mesh.background.map(facet.right),
            space,
        }
    }

    pub fn point(&self, s: f64) -> Point {
        self.facet.a + s * (self.facet.b - self.facet.a)
    }

    /// Basis jumps at facet parameter `s ∈ [0, 1]`.
    pub fn jumps(&self, s: f64) -> FacetJumps {
        let x = self.point(s);
        let k = self.space.order;
        let left = shape_eval(k, self.left_map.to_reference(x), &self.left_map);
        let right = shape_eval(k, self.right_map.to_reference(x), &self.right_map);
        let ln = &self.space.dof_map[self.facet.left];
        let rn = &self.space.dof_map[self.facet.right];
        let mut nodes = ln.clone();
        let mut value = left.values.clone();
        let mut grad = left.grads.clone();
        let mut hess = left.hessians.clone();
        for (b, &node) in rn.iter().enumerate() {
            let idx = match nodes.iter().position(|&m| m == node) {
                Some(i) => i,
                None => {
                    nodes.push(node);
                    value.push(0.0);
                    grad.push(Point::zeros());
                    hess.push(Mat2::zeros());
                    nodes.len() - 1
                }
            };
            value[idx] -= right.values[b];
            grad[idx] -= right.grads[b];
            hess[idx] -= right.hessians[b];
        }
        FacetJumps { nodes, value, grad, hess }
    }

    /// `[[∂ⁿʲ v]]` of field `field` of a global coefficient vector.
    pub fn normal_derivative_jump(&self, coeffs: &[f64], field: usize, j: usize, s: f64) -> Result<f64> {
        if j > self.space.order {
            return Err(Error::OrderTooHigh {
                requested: j,
                order: self.space.order,
            });
        }
        let jumps = self.jumps(s);
        let per_node = jumps.normal_derivative(j, self.facet.normal);
        Ok(jumps
            .nodes
            .iter()
            .zip(per_node)
            .map(|(&node, d)| coeffs[self.space.dof(node, field)] * d)
            .sum())
    }
}
