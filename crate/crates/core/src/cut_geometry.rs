//! Implicit description of the physical domain and clipping of background
//! elements against it.
//!
//! The domain is a convex polygon. Each active element is clipped against the
//! domain by successive half-plane clipping; the clipped polygon is fan
//! triangulated for volume quadrature, and clipped edges lying on the domain
//! boundary become boundary segments carrying the outward unit normal.

use crate::{Error, Mat2, Point, Result};

/// Relative tolerance (in units of the element size) for deciding that a point
/// lies on a domain edge.
pub const ON_EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DomainPolygon {
    vertices: Vec<Point>,
}

impl DomainPolygon {
    /// Counter-clockwise convex polygon. Fails for fewer than three
    /// vertices, clockwise or non-convex input, or zero area.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidConfig(
                "domain polygon needs at least three vertices".into(),
            ));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross(b - a, c - b) <= 0.0 {
                return Err(Error::InvalidConfig(
                    "domain polygon must be convex and counter-clockwise".into(),
                ));
            }
        }
        let poly = Self { vertices };
        if poly.area() <= 0.0 {
            return Err(Error::InvalidConfig("domain polygon has no area".into()));
        }
        Ok(poly)
    }

    /// The square `[-half, half]^2`.
    pub fn square(half: f64) -> Self {
        Self::new(vec![
            Point::new(-half, -half),
            Point::new(half, -half),
            Point::new(half, half),
            Point::new(-half, half),
        ])
        .expect("square is convex")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Edges as `(start, end, outward unit normal)`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let t = (b - a).normalize();
            (a, b, Point::new(t.y, -t.x))
        })
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b, _)| (b - a).norm()).sum()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Signed Euclidean distance to the boundary, negative inside.
    pub fn signed_distance(&self, x: Point) -> f64 {
        let max_edge = self
            .edges()
            .map(|(a, _, n)| (x - a).dot(&n))
            .fold(f64::NEG_INFINITY, f64::max);
        if max_edge <= 0.0 {
            return max_edge;
        }
        self.edges()
            .map(|(a, b, _)| point_segment_distance(x, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub a: Point,
    pub b: Point,
    pub normal: Point,
}

impl BoundarySegment {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn midpoint(&self) -> Point {
        0.5 * (self.a + self.b)
    }
}

#[derive(Debug, Clone)]
pub struct CutCell {
    pub element_id: usize,
    pub tris: Vec<[Point; 3]>,
    pub boundary_segments: Vec<BoundarySegment>,
}

impl CutCell {
    pub fn area(&self) -> f64 {
        self.tris.iter().map(triangle_area).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projectors {
    pub normal: Mat2,
    pub tangential: Mat2,
}

pub fn projectors_at(normal: Point) -> Result<Projectors> {
    let length = normal.norm();
    if (length - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitNormal { length });
    }
    let pn = normal * normal.transpose();
    Ok(Projectors {
        normal: pn,
        tangential: Mat2::identity() - pn,
    })
}

/// Clips a convex element polygon against the domain.
///
/// `h` sets the scale of the on-edge tolerance. An element lying fully inside
/// and not touching the boundary yields two triangles and no segments.
pub fn clip_element(
    element_id: usize,
    element: &[Point],
    domain: &DomainPolygon,
    h: f64,
) -> Result<CutCell> {
    let tol = ON_EDGE_TOL * h;
    let mut poly: Vec<Point> = element.to_vec();
    for (a, _, n) in domain.edges() {
        poly = clip_halfplane(&poly, a, n, tol);
        if poly.is_empty() {
            break;
        }
    }
    let poly = dedup_polygon(poly, tol);
    if poly.len() < 3 {
        return Err(Error::DegenerateIntersection {
            element: element_id,
        });
    }

    let tris = (1..poly.len() - 1)
        .map(|i| [poly[0], poly[i], poly[i + 1]])
        .collect();

    let mut boundary_segments = Vec::new();
    let m = poly.len();
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        if (q - p).norm() <= tol {
            continue;
        }
        for (a, _, n) in domain.edges() {
            if (p - a).dot(&n).abs() < tol && (q - a).dot(&n).abs() < tol {
                boundary_segments.push(BoundarySegment { a: p, b: q, normal: n });
                break;
            }
        }
    }

    Ok(CutCell {
        element_id,
        tris,
        boundary_segments,
    })
}

/// Keeps the part of `poly` with `(x - a)·n <= tol`.
fn clip_halfplane(poly: &[Point], a: Point, n: Point, tol: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let m = poly.len();
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let dp = (p - a).dot(&n);
        let dq = (q - a).dot(&n);
        let p_in = dp <= tol;
        let q_in = dq <= tol;
        if p_in {
            out.push(p);
        }
        if p_in != q_in {
            // strictly opposite sides once tolerance is accounted for
            if (dp < -tol && dq > tol) || (dp > tol && dq < -tol) {
                let t = dp / (dp - dq);
                let mut x = p + t * (q - p);
                // snap onto the clipping line
                x -= ((x - a).dot(&n)) * n;
                out.push(x);
            }
        }
    }
    out
}

fn dedup_polygon(poly: Vec<Point>, tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(poly.len());
    for p in poly {
        if out.last().is_none_or(|l| (p - l).norm() > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= tol {
        out.pop();
    }
    out
}

pub fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

pub fn triangle_area(t: &[Point; 3]) -> f64 {
    0.5 * cross(t[1] - t[0], t[2] - t[0])
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| cross(poly[i], poly[(i + 1) % n]))
        .sum::<f64>()
}

fn point_segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((x - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (x - (a + t * ab)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> [Point; 4] {
        [
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ]
    }

    #[test]
    fn clip_axis_aligned_element_on_right_edge() {
        let dom = DomainPolygon::square(1.0);
        let cell = clip_element(0, &rect(0.8, 1.2, 0.0, 0.4), &dom, 0.4).unwrap();
        assert_relative_eq!(cell.area(), 0.08, max_relative = 1e-14);
        assert_eq!(cell.boundary_segments.len(), 1);
        let s = cell.boundary_segments[0];
        assert_relative_eq!(s.normal, Point::new(1.0, 0.0), epsilon = 1e-15);
        let (lo, hi) = if s.a.y < s.b.y { (s.a, s.b) } else { (s.b, s.a) };
        assert_relative_eq!(lo, Point::new(1.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(hi, Point::new(1.0, 0.4), epsilon = 1e-15);
    }

    #[test]
    fn interior_element_is_two_triangles() {
        let dom = DomainPolygon::square(1.0);
        let cell = clip_element(3, &rect(-0.2, 0.2, -0.2, 0.2), &dom, 0.4).unwrap();
        assert_eq!(cell.tris.len(), 2);
        assert!(cell.boundary_segments.is_empty());
        assert_relative_eq!(cell.area(), 0.16, max_relative = 1e-14);
    }

    #[test]
    fn outside_element_is_degenerate() {
        let dom = DomainPolygon::square(1.0);
        let err = clip_element(7, &rect(1.2, 1.6, 0.0, 0.4), &dom, 0.4).unwrap_err();
        assert!(matches!(err, Error::DegenerateIntersection { element: 7 }));
    }

    #[test]
    fn corner_element_gets_two_segments() {
        let dom = DomainPolygon::square(1.0);
        let cell = clip_element(0, &rect(0.8, 1.2, 0.8, 1.2), &dom, 0.4).unwrap();
        assert_relative_eq!(cell.area(), 0.04, max_relative = 1e-14);
        assert_eq!(cell.boundary_segments.len(), 2);
        let len: f64 = cell.boundary_segments.iter().map(|s| s.length()).sum();
        assert_relative_eq!(len, 0.4, max_relative = 1e-14);
    }

    #[test]
    fn rotated_corner_element_matches_monte_carlo_area() {
        use rand::{Rng, SeedableRng};
        let dom = DomainPolygon::square(1.0);
        let h = 0.4;
        let (s, c) = (std::f64::consts::FRAC_PI_4).sin_cos();
        let rot = |p: Point| Point::new(c * p.x - s * p.y, s * p.x + c * p.y);
        // square of edge h rotated by 45 degrees, centred on the corner (1, 1)
        let centre = Point::new(1.0, 1.0);
        let corners: Vec<Point> = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .iter()
            .map(|&(a, b)| centre + rot(Point::new(a * h / 2.0, b * h / 2.0)))
            .collect();
        let cell = clip_element(0, &corners, &dom, h).unwrap();

        // Monte-Carlo oracle over the element's reference square
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let samples = 10_000_000usize;
        let mut hits = 0usize;
        for _ in 0..samples {
            let xi: f64 = rng.gen_range(-1.0..1.0);
            let eta: f64 = rng.gen_range(-1.0..1.0);
            let x = centre + rot(Point::new(xi * h / 2.0, eta * h / 2.0));
            if x.x.abs() < 1.0 && x.y.abs() < 1.0 {
                hits += 1;
            }
        }
        let mc = h * h * hits as f64 / samples as f64;
        assert_relative_eq!(cell.area(), mc, max_relative = 1e-3);
    }

    #[test]
    fn projectors_examples() {
        let p = projectors_at(Point::new(1.0, 0.0)).unwrap();
        assert_eq!(p.normal, Mat2::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(p.tangential, Mat2::new(0.0, 0.0, 0.0, 1.0));
        let p = projectors_at(Point::new(0.0, 1.0)).unwrap();
        assert_eq!(p.normal, Mat2::new(0.0, 0.0, 0.0, 1.0));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let p = projectors_at(Point::new(r, r)).unwrap();
        assert_relative_eq!(p.normal, Mat2::new(0.5, 0.5, 0.5, 0.5), epsilon = 1e-15);
    }

    #[test]
    fn projectors_reject_non_unit() {
        assert!(matches!(
            projectors_at(Point::new(1.0, 1.0)),
            Err(Error::NonUnitNormal { .. })
        ));
    }

    #[test]
    fn signed_distance_sign_and_value() {
        let dom = DomainPolygon::square(1.0);
        assert_relative_eq!(dom.signed_distance(Point::new(0.0, 0.0)), -1.0);
        assert_relative_eq!(dom.signed_distance(Point::new(0.5, 0.9)), -0.1, epsilon = 1e-15);
        assert_relative_eq!(dom.signed_distance(Point::new(2.0, 0.0)), 1.0);
        assert_relative_eq!(dom.signed_distance(Point::new(2.0, 2.0)), 2f64.sqrt());
    }

    #[test]
    fn box_domain_measures() {
        let dom = DomainPolygon::square(1.0);
        assert_relative_eq!(dom.area(), 4.0);
        assert_relative_eq!(dom.perimeter(), 8.0);
    }

    #[test]
    fn clockwise_polygon_rejected() {
        let cw = vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
        ];
        assert!(DomainPolygon::new(cw).is_err());
    }

    proptest::proptest! {
        #[test]
        fn projector_identities(angle in 0.0f64..std::f64::consts::TAU) {
            let p = projectors_at(Point::new(angle.cos(), angle.sin())).unwrap();
            let id = Mat2::identity();
            proptest::prop_assert!((p.normal + p.tangential - id).abs().max() < 1e-14);
            proptest::prop_assert!((p.normal * p.normal - p.normal).abs().max() < 1e-14);
            proptest::prop_assert!((p.tangential * p.tangential - p.tangential).abs().max() < 1e-14);
            proptest::prop_assert!((p.normal * p.tangential).abs().max() < 1e-14);
        }
    }
}
