//! Manufactured box-flow solution, error norms and convergence rates.

use std::sync::Arc;

use rayon::prelude::*;

use crate::assembly::{OseenConfig, StabilizationScalings, P, U1, U2};
use crate::cut_geometry::projectors_at;
use crate::fem_basis::{shape_eval, FunctionSpace};
use crate::mesh::ActiveMesh;
use crate::quadrature::{boundary_rule, cut_volume_rule};
use crate::{Error, Mat2, Point, Result};

/// Rotating box flow on `[-1, 1]²` with a polynomial pressure. The advective
/// field equals the velocity itself and the velocity is tangential on the
/// box edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    pub nu: f64,
    pub sigma: f64,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl ExactSolution {
    pub fn new(nu: f64, sigma: f64) -> Self {
        Self { nu, sigma }
    }

    pub fn u(&self, x: Point) -> Point {
        let (x, y) = (x.x, x.y);
        Point::new(
            0.75 * y.powi(3) * (1.0 - x.powi(4)) + 1.25 * y * (1.0 - x * x),
            -0.75 * x.powi(3) * (1.0 - y.powi(4)) - 1.25 * x * (1.0 - y * y),
        )
    }

    /// `G[(i, j)] = ∂u_i/∂x_j`.
    pub fn grad_u(&self, x: Point) -> Mat2 {
        let (x, y) = (x.x, x.y);
        Mat2::new(
            -3.0 * x.powi(3) * y.powi(3) - 2.5 * x * y,
            2.25 * y * y * (1.0 - x.powi(4)) + 1.25 * (1.0 - x * x),
            -2.25 * x * x * (1.0 - y.powi(4)) - 1.25 * (1.0 - y * y),
            3.0 * x.powi(3) * y.powi(3) + 2.5 * x * y,
        )
    }

    pub fn laplace_u(&self, x: Point) -> Point {
        let (x, y) = (x.x, x.y);
        Point::new(
            -9.0 * x * x * y.powi(3) - 2.5 * y + 4.5 * y * (1.0 - x.powi(4)),
            -4.5 * x * (1.0 - y.powi(4)) + 9.0 * x.powi(3) * y * y + 2.5 * x,
        )
    }

    fn odd_series(t: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        for i in 0..=2u32 {
            let n = 2 * i + 1;
            s += (3.0 * t).powi(n as i32) / factorial(n);
            ds += 3.0 * (3.0 * t).powi(n as i32 - 1) / factorial(n - 1);
        }
        (s, ds)
    }

    fn even_series(t: f64) -> (f64, f64) {
        let mut c = 0.0;
        let mut dc = 0.0;
        for j in 0..=3u32 {
            let n = 2 * j;
            c += (3.0 * t).powi(n as i32) / factorial(n);
            if n > 0 {
                dc += 3.0 * (3.0 * t).powi(n as i32 - 1) / factorial(n - 1);
            }
        }
        (c, dc)
    }

    pub fn p(&self, x: Point) -> f64 {
        Self::odd_series(x.x).0 * Self::even_series(x.y).0
    }

    pub fn grad_p(&self, x: Point) -> Point {
        let (s, ds) = Self::odd_series(x.x);
        let (c, dc) = Self::even_series(x.y);
        Point::new(ds * c, s * dc)
    }

    /// `f = σu + (u·∇)u - νΔu + ∇p`.
    pub fn f(&self, x: Point) -> Point {
        let u = self.u(x);
        let g = self.grad_u(x);
        self.sigma * u + g * u - self.nu * self.laplace_u(x) + self.grad_p(x)
    }

    pub fn g(&self, x: Point) -> Point {
        self.u(x)
    }

    /// `2νε(u)n`.
    pub fn h_traction(&self, x: Point, n: Point) -> Point {
        let g = self.grad_u(x);
        self.nu * (g + g.transpose()) * n
    }

    /// Installs `β = u`, the body force and the boundary data into `config`
    /// and matches its `ν`, `σ`.
    pub fn configure(&self, config: &mut OseenConfig) {
        let me = *self;
        config.nu = self.nu;
        config.sigma = self.sigma;
        config.beta = Arc::new(move |x| me.u(x));
        config.body_force = Arc::new(move |x| me.f(x));
        config.g_dirichlet = Arc::new(move |x| me.g(x));
        config.h_traction = Arc::new(move |x, n| me.h_traction(x, n));
    }
}

/// Field values of a reference solution for [`compute_errors`].
pub trait ReferenceFields: Sync {
    fn u(&self, x: Point) -> Point;
    fn grad_u(&self, x: Point) -> Mat2;
    fn p(&self, x: Point) -> f64;
}

impl ReferenceFields for ExactSolution {
    fn u(&self, x: Point) -> Point {
        ExactSolution::u(self, x)
    }
    fn grad_u(&self, x: Point) -> Mat2 {
        ExactSolution::grad_u(self, x)
    }
    fn p(&self, x: Point) -> f64 {
        ExactSolution::p(self, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub l2_u_bulk: f64,
    pub l2_gradu_bulk: f64,
    pub l2_p_bulk: f64,
    pub l2_u_gamma: f64,
    pub l2_gradu_gamma: f64,
    pub l2_p_gamma: f64,
    pub dofs: usize,
    pub h: f64,
}

impl ErrorReport {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.l2_u_bulk,
            self.l2_gradu_bulk,
            self.l2_p_bulk,
            self.l2_u_gamma,
            self.l2_gradu_gamma,
            self.l2_p_gamma,
        ]
    }
}

pub const ERROR_NAMES: [&str; 6] = ["err_u", "err_gradu", "err_p", "err_u_gamma", "err_gradu_gamma", "err_p_gamma"];

pub fn error_quadrature_order(k: usize) -> usize {
    2 * k + 6
}

/// Discrete `(u, ∇u, p)` at a physical point of element `e`.
pub fn eval_discrete(space: &FunctionSpace, coeffs: &[f64], mesh: &ActiveMesh, e: usize, x: Point) -> (Point, Mat2, f64) {
    let map = mesh.background.map(e);
    let s = shape_eval(space.order, map.to_reference(x), &map);
    let (u1, g1, _) = space.eval_field(coeffs, e, U1, &s);
    let (u2, g2, _) = space.eval_field(coeffs, e, U2, &s);
    let (p, _, _) = space.eval_field(coeffs, e, P, &s);
    (Point::new(u1, u2), Mat2::new(g1.x, g1.y, g2.x, g2.y), p)
}

/// `L²` errors over `Ω` and `Γ` of the discrete field `coeffs` (nodal
/// `(u1, u2, p)` values) against `exact`.
pub fn compute_errors(
    coeffs: &[f64],
    exact: &impl ReferenceFields,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
) -> Result<ErrorReport> {
    let order = error_quadrature_order(space.order);
    let sums: Vec<[f64; 6]> = mesh
        .active_elements
        .par_iter()
        .enumerate()
        .map(|(idx, &e)| {
            let mut acc = [0.0; 6];
            let map = mesh.background.map(e);
            let rule = cut_volume_rule(&mesh.cells[idx], order, &map, mesh.is_cut(e))?;
            for (&x, &w) in rule.points.iter().zip(&rule.weights) {
                let (u, g, p) = eval_discrete(space, coeffs, mesh, e, x);
                acc[0] += w * (u - exact.u(x)).norm_squared();
                acc[1] += w * (g - exact.grad_u(x)).norm_squared();
                acc[2] += w * (p - exact.p(x)).powi(2);
            }
            for seg in &mesh.cells[idx].boundary_segments {
                let rule = boundary_rule(seg, order)?;
                for (&x, &w) in rule.points.iter().zip(&rule.weights) {
                    let (u, g, p) = eval_discrete(space, coeffs, mesh, e, x);
                    acc[3] += w * (u - exact.u(x)).norm_squared();
                    acc[4] += w * (g - exact.grad_u(x)).norm_squared();
                    acc[5] += w * (p - exact.p(x)).powi(2);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut t = [0.0; 6];
    for s in sums {
        for i in 0..6 {
            t[i] += s[i];
        }
    }
    Ok(ErrorReport {
        l2_u_bulk: t[0].sqrt(),
        l2_gradu_bulk: t[1].sqrt(),
        l2_p_bulk: t[2].sqrt(),
        l2_u_gamma: t[3].sqrt(),
        l2_gradu_gamma: t[4].sqrt(),
        l2_p_gamma: t[5].sqrt(),
        dofs: space.n_field_dofs(),
        h: mesh.h(),
    })
}

/// `∫_Ω p_h` and `‖p_h‖_{L²(Ω)}` of a discrete field.
pub fn pressure_moments(coeffs: &[f64], mesh: &ActiveMesh, space: &FunctionSpace) -> Result<(f64, f64)> {
    let order = error_quadrature_order(space.order);
    let mut mean = 0.0;
    let mut sq = 0.0;
    for (idx, &e) in mesh.active_elements.iter().enumerate() {
        let map = mesh.background.map(e);
        let rule = cut_volume_rule(&mesh.cells[idx], order, &map, mesh.is_cut(e))?;
        for (&x, &w) in rule.points.iter().zip(&rule.weights) {
            let (_, _, p) = eval_discrete(space, coeffs, mesh, e, x);
            mean += w * p;
            sq += w * p * p;
        }
    }
    Ok((mean, sq.sqrt()))
}

/// Pairwise observed orders `log(E_i/E_{i+1}) / log(h_i/h_{i+1})`.
pub fn convergence_rates(series: &[(f64, f64)]) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::InvalidSeries);
    }
    for &(h, e) in series {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::NonPositiveError(e));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidSeries);
        }
    }
    series
        .windows(2)
        .map(|w| {
            let ((h0, e0), (h1, e1)) = (w[0], w[1]);
            if h1 >= h0 {
                return Err(Error::InvalidSeries);
            }
            Ok((e0 / e1).ln() / (h0 / h1).ln())
        })
        .collect()
}

/// Mesh-dependent energy norm of a discrete velocity field, for monitoring.
pub fn diagnostic_energy_norm(
    coeffs: &[f64],
    config: &OseenConfig,
    scalings: &StabilizationScalings,
    mesh: &ActiveMesh,
    space: &FunctionSpace,
) -> Result<f64> {
    let order = error_quadrature_order(space.order);
    let h = scalings.h;
    let eps = config.slip_length;
    let tangential = if eps.is_infinite() { 0.0 } else { config.nu / (eps.value() + config.gamma_t * h) };
    let mut total = 0.0;
    for (idx, &e) in mesh.active_elements.iter().enumerate() {
        let map = mesh.background.map(e);
        let rule = cut_volume_rule(&mesh.cells[idx], order, &map, mesh.is_cut(e))?;
        for (&x, &w) in rule.points.iter().zip(&rule.weights) {
            let (u, g, _) = eval_discrete(space, coeffs, mesh, e, x);
            total += w * (config.sigma * u.norm_squared() + config.nu * g.norm_squared());
        }
        let normal = (config.nu + scalings.phi_u[e]) / (config.gamma_n * h);
        for seg in &mesh.cells[idx].boundary_segments {
            let pt = projectors_at(seg.normal)?.tangential;
            let rule = boundary_rule(seg, order)?;
            for (&x, &w) in rule.points.iter().zip(&rule.weights) {
                let (u, _, _) = eval_discrete(space, coeffs, mesh, e, x);
                let un = u.dot(&seg.normal);
                let bn = (config.beta)(x).dot(&seg.normal).abs();
                total += w * (normal * un * un + tangential * (pt * u).norm_squared() + bn * u.norm_squared());
            }
        }
    }
    Ok(total.sqrt())
}
