//! Rotated structured background mesh, the active mesh covering the domain,
//! and the interior / ghost-penalty facet sets.

use crate::cut_geometry::{clip_element, CutCell, DomainPolygon};
use crate::{Error, Point, Result};

/// Relative area tolerance used to classify elements as inside, cut or
/// (sliver) outside.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `N x N` squares of edge `h = 2L/N` covering `[-L, L]^2`, rotated by
/// `rotation` about the origin.
#[derive(Debug, Clone)]
pub struct BackgroundMesh {
    pub n_per_side: usize,
    pub half_extent: f64,
    pub rotation: f64,
    pub h: f64,
    pub nodes: Vec<Point>,
    pub elements: Vec<[usize; 4]>,
}

impl BackgroundMesh {
    pub fn new(n_per_side: usize, half_extent: f64, rotation: f64) -> Result<Self> {
        if n_per_side == 0 || !(half_extent > 0.0) || !rotation.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "background mesh needs N >= 1 and L > 0 (got N = {n_per_side}, L = {half_extent})"
            )));
        }
        Ok(build_background_mesh(n_per_side, half_extent, rotation))
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i + j * (self.n_per_side + 1)
    }

    /// Element grid position `(i, j)`.
    pub fn element_ij(&self, e: usize) -> (usize, usize) {
        (e % self.n_per_side, e / self.n_per_side)
    }

    pub fn element_index(&self, i: usize, j: usize) -> usize {
        i + j * self.n_per_side
    }

    pub fn corners(&self, e: usize) -> [Point; 4] {
        self.elements[e].map(|n| self.nodes[n])
    }

    pub fn map(&self, e: usize) -> ElementMap {
        let (i, j) = self.element_ij(e);
        let l = self.half_extent;
        let h = self.h;
        let c = Point::new(-l + (i as f64 + 0.5) * h, -l + (j as f64 + 0.5) * h);
        let (s, co) = self.rotation.sin_cos();
        ElementMap {
            centre: Point::new(co * c.x - s * c.y, s * c.x + co * c.y),
            half_h: 0.5 * h,
            cos: co,
            sin: s,
        }
    }
}

pub fn build_background_mesh(n_per_side: usize, half_extent: f64, rotation: f64) -> BackgroundMesh {
    let n = n_per_side;
    let h = 2.0 * half_extent / n as f64;
    let (s, c) = rotation.sin_cos();
    let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let x = -half_extent + i as f64 * h;
            let y = -half_extent + j as f64 * h;
            nodes.push(Point::new(c * x - s * y, s * x + c * y));
        }
    }
    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let n0 = i + j * (n + 1);
            elements.push([n0, n0 + 1, n0 + n + 2, n0 + n + 1]);
        }
    }
    BackgroundMesh {
        n_per_side,
        half_extent,
        rotation,
        h,
        nodes,
        elements,
    }
}

/// Affine map from the reference square `[-1, 1]^2` onto a background
/// element: `x = centre + (h/2) R ξ`.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub centre: Point,
    pub half_h: f64,
    pub cos: f64,
    pub sin: f64,
}

impl ElementMap {
    pub fn to_physical(&self, xi: Point) -> Point {
        let r = Point::new(self.cos * xi.x - self.sin * xi.y, self.sin * xi.x + self.cos * xi.y);
        self.centre + self.half_h * r
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = (x - self.centre) / self.half_h;
        Point::new(self.cos * d.x + self.sin * d.y, -self.sin * d.x + self.cos * d.y)
    }

    pub fn jacobian_det(&self) -> f64 {
        self.half_h * self.half_h
    }

    /// Physical direction of a reference direction.
    pub fn rotate(&self, v: Point) -> Point {
        Point::new(self.cos * v.x - self.sin * v.y, self.sin * v.x + self.cos * v.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetDirection {
    /// shared edge at `ξ = +1` of the left element (neighbour in `i + 1`)
    Xi,
    /// shared edge at `η = +1` of the left element (neighbour in `j + 1`)
    Eta,
}

/// Interior facet shared by two active elements. `left` has the lower
/// element id; the facet normal points from `left` into `right`.
#[derive(Debug, Clone, Copy)]
pub struct Facet {
    pub left: usize,
    pub right: usize,
    pub a: Point,
    pub b: Point,
    pub normal: Point,
    pub direction: FacetDirection,
}

impl Facet {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Outside,
    Inside,
    Cut,
}

#[derive(Debug, Clone)]
pub struct ActiveMesh {
    pub background: BackgroundMesh,
    pub domain: DomainPolygon,
    pub kinds: Vec<ElementKind>,
    pub active_elements: Vec<usize>,
    pub cut_elements: Vec<usize>,
    pub interior_facets: Vec<Facet>,
    /// indices into `interior_facets`
    pub ghost_facets: Vec<usize>,
    pub active_nodes: Vec<usize>,
    /// cut cells, parallel to `active_elements`
    pub cells: Vec<CutCell>,
}

impl ActiveMesh {
    pub fn h(&self) -> f64 {
        self.background.h
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.kinds[e] != ElementKind::Outside
    }

    pub fn is_cut(&self, e: usize) -> bool {
        self.kinds[e] == ElementKind::Cut
    }

    pub fn ghost_facet_iter(&self) -> impl Iterator<Item = &Facet> + '_ {
        self.ghost_facets.iter().map(move |&f| &self.interior_facets[f])
    }

    /// Is the mesh fitted, i.e. no element is cut.
    pub fn is_fitted(&self) -> bool {
        self.cut_elements.is_empty()
    }
}

/// Classifies every background element against `domain` and collects the
/// active elements, cut elements and facet sets.
pub fn extract_active_mesh(mesh: BackgroundMesh, domain: DomainPolygon) -> Result<ActiveMesh> {
    let h = mesh.h;
    let full = h * h;
    let mut kinds = vec![ElementKind::Outside; mesh.elements.len()];
    let mut active_elements = Vec::new();
    let mut cut_elements = Vec::new();
    let mut cells = Vec::new();

    for e in 0..mesh.elements.len() {
        let corners = mesh.corners(e);
        let kind = match clip_element(e, &corners, &domain, h) {
            Ok(cell) => {
                let area = cell.area();
                let kind = if area >= full * (1.0 - DEGENERACY_TOL) {
                    ElementKind::Inside
                } else if area > full * DEGENERACY_TOL {
                    ElementKind::Cut
                } else {
                    classify_by_centroid(&mesh, e, &domain)
                };
                if kind != ElementKind::Outside {
                    cells.push(cell);
                }
                kind
            }
            Err(Error::DegenerateIntersection { .. }) => {
                let kind = classify_by_centroid(&mesh, e, &domain);
                if kind != ElementKind::Outside {
                    // a sliver with an inside centroid cannot occur for a
                    // convex domain, keep the whole element for safety
                    cells.push(CutCell {
                        element_id: e,
                        tris: vec![[corners[0], corners[1], corners[2]], [corners[0], corners[2], corners[3]]],
                        boundary_segments: Vec::new(),
                    });
                }
                kind
            }
            Err(err) => return Err(err),
        };
        kinds[e] = kind;
        match kind {
            ElementKind::Outside => {}
            ElementKind::Inside => active_elements.push(e),
            ElementKind::Cut => {
                active_elements.push(e);
                cut_elements.push(e);
            }
        }
    }
    if active_elements.is_empty() {
        return Err(Error::EmptyActiveMesh);
    }

    let n = mesh.n_per_side;
    let mut interior_facets = Vec::new();
    let mut ghost_facets = Vec::new();
    for &e in &active_elements {
        let (i, j) = mesh.element_ij(e);
        let conn = mesh.elements[e];
        let map = mesh.map(e);
        let mut push = |other: usize, a: usize, b: usize, dir: FacetDirection, ref_normal: Point| {
            if kinds[other] == ElementKind::Outside {
                return;
            }
            let idx = interior_facets.len();
            interior_facets.push(Facet {
                left: e,
                right: other,
                a: mesh.nodes[a],
                b: mesh.nodes[b],
                normal: map.rotate(ref_normal),
                direction: dir,
            });
            if kinds[e] == ElementKind::Cut || kinds[other] == ElementKind::Cut {
                ghost_facets.push(idx);
            }
        };
        if i + 1 < n {
            push(mesh.element_index(i + 1, j), conn[1], conn[2], FacetDirection::Xi, Point::new(1.0, 0.0));
        }
        if j + 1 < n {
            push(mesh.element_index(i, j + 1), conn[3], conn[2], FacetDirection::Eta, Point::new(0.0, 1.0));
        }
    }

    let mut node_used = vec![false; mesh.nodes.len()];
    for &e in &active_elements {
        for &v in &mesh.elements[e] {
            node_used[v] = true;
        }
    }
    let active_nodes = (0..mesh.nodes.len()).filter(|&v| node_used[v]).collect();

    Ok(ActiveMesh {
        background: mesh,
        domain,
        kinds,
        active_elements,
        cut_elements,
        interior_facets,
        ghost_facets,
        active_nodes,
        cells,
    })
}

fn classify_by_centroid(mesh: &BackgroundMesh, e: usize, domain: &DomainPolygon) -> ElementKind {
    let c = mesh.map(e).centre;
    if domain.signed_distance(c) < 0.0 {
        ElementKind::Cut
    } else {
        ElementKind::Outside
    }
}
