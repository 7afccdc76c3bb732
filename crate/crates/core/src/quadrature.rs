//! Gauss rules on segments, squares and triangles, and their composition
//! into rules over cut cells and facets.

use crate::cut_geometry::CutCell;
use crate::mesh::ElementMap;
use crate::{Error, Point, Result};

/// Highest polynomial degree a segment rule can be requested for.
pub const MAX_ORDER: usize = 19;

/// One-dimensional rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Two-dimensional rule. `reference` holds element reference coordinates
/// when the rule was built for an element, and is empty otherwise.
#[derive(Debug, Clone, Default)]
pub struct QuadRule {
    pub points: Vec<Point>,
    pub reference: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    fn append(&mut self, other: QuadRule) {
        self.points.extend(other.points);
        self.reference.extend(other.reference);
        self.weights.extend(other.weights);
    }
}

/// Gauss-Legendre rule exact for polynomials of degree `order`.
pub fn gauss_segment(order: usize) -> Result<Rule1d> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(gauss_legendre(order / 2 + 1))
}

/// `n`-point Gauss-Legendre rule by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Rule1d {
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Rule1d { points, weights }
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor Gauss rule on `[-1, 1]^2`.
pub fn gauss_square(order: usize) -> Result<QuadRule> {
    let g = gauss_segment(order)?;
    let mut rule = QuadRule::default();
    for (&y, &wy) in g.points.iter().zip(&g.weights) {
        for (&x, &wx) in g.points.iter().zip(&g.weights) {
            rule.points.push(Point::new(x, y));
            rule.weights.push(wx * wy);
        }
    }
    Ok(rule)
}

/// Collapsed-coordinate rule on a physical triangle, exact for total degree
/// `order`.
pub fn triangle_rule(tri: &[Point; 3], order: usize) -> Result<QuadRule> {
    let gu = gauss_segment(order + 1)?;
    let gv = gauss_segment(order)?;
    let [a, b, c] = *tri;
    let area2 = ((b - a).x * (c - a).y - (b - a).y * (c - a).x).abs();
    let mut rule = QuadRule::default();
    for (&su, &wu) in gu.points.iter().zip(&gu.weights) {
        let u = 0.5 * (su + 1.0);
        for (&sv, &wv) in gv.points.iter().zip(&gv.weights) {
            let v = 0.5 * (sv + 1.0);
            rule.points.push(a + u * (b - a) + u * v * (c - b));
            rule.weights.push(0.25 * wu * wv * u * area2);
        }
    }
    Ok(rule)
}

/// Rule over `T ∩ Ω` for the element behind `map`. Whole elements (no
/// boundary crossing) use the tensor rule on the square.
pub fn cut_volume_rule(cell: &CutCell, order: usize, map: &ElementMap, is_cut: bool) -> Result<QuadRule> {
    if !is_cut {
        return element_volume_rule(order, map);
    }
    let mut rule = QuadRule::default();
    for tri in &cell.tris {
        let mut t = triangle_rule(tri, order)?;
        t.reference = t.points.iter().map(|&x| map.to_reference(x)).collect();
        rule.append(t);
    }
    Ok(rule)
}

/// Tensor rule over the whole element.
pub fn element_volume_rule(order: usize, map: &ElementMap) -> Result<QuadRule> {
    let sq = gauss_square(order)?;
    let det = map.jacobian_det();
    Ok(QuadRule {
        points: sq.points.iter().map(|&xi| map.to_physical(xi)).collect(),
        weights: sq.weights.iter().map(|w| w * det).collect(),
        reference: sq.points,
    })
}

/// Rule along the physical segment `a -> b`; each point also carries its
/// segment parameter in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct SegmentRule {
    pub points: Vec<Point>,
    pub params: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SegmentRule {
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

pub fn facet_rule(a: Point, b: Point, order: usize) -> Result<SegmentRule> {
    let g = gauss_segment(order)?;
    let half = 0.5 * (b - a).norm();
    let params: Vec<f64> = g.points.iter().map(|s| 0.5 * (s + 1.0)).collect();
    Ok(SegmentRule {
        points: params.iter().map(|&t| a + t * (b - a)).collect(),
        weights: g.weights.iter().map(|w| w * half).collect(),
        params,
    })
}

/// Same as [`facet_rule`]; kept separate so boundary and facet orders can be
/// tuned independently by callers.
pub fn boundary_rule(seg: &crate::cut_geometry::BoundarySegment, order: usize) -> Result<SegmentRule> {
    facet_rule(seg.a, seg.b, order)
}
