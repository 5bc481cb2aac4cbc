//! The polygonal domain: an outer ring with polygonal holes.
//!
//! Vertices are indexed by [`VertexId`] over the concatenation of the outer
//! ring and the hole rings in input order. Rings are stored in canonical
//! orientation (outer counter-clockwise, holes clockwise) so that the domain
//! interior is always to the left of a directed edge.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Point, Segment};
use crate::tolerance::Tolerances;
use crate::visgraph::VisibilityGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationKind {
    TooFewVertices,
    NonFiniteCoordinate,
    RepeatedVertex,
    SelfIntersection,
    HoleOutsideOuter,
    OverlappingHoles,
    ZeroArea,
}

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid domain ({kind:?}): {message}")]
    Validation { kind: ValidationKind, message: String },
}

impl DomainError {
    fn invalid(kind: ValidationKind, message: impl Into<String>) -> Self {
        DomainError::Validation { kind, message: message.into() }
    }
}

/// On-disk representation: `{ "outer": [[x, y], ...], "holes": [[[x, y], ...], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainJson {
    pub outer: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
}

#[derive(Debug)]
pub struct PolygonalDomain {
    rings: Vec<Vec<Point>>,
    vertices: Vec<Point>,
    /// First vertex index of each ring, plus a trailing total.
    ring_start: Vec<usize>,
    edges: Vec<(usize, usize)>,
    reflex: Vec<bool>,
    reoriented: bool,
    bbox: (Point, Point),
    tol: Tolerances,
    graph: OnceLock<VisibilityGraph>,
}

impl Clone for PolygonalDomain {
    fn clone(&self) -> Self {
        let graph = OnceLock::new();
        if let Some(g) = self.graph.get() {
            let _ = graph.set(g.clone());
        }
        Self {
            rings: self.rings.clone(),
            vertices: self.vertices.clone(),
            ring_start: self.ring_start.clone(),
            edges: self.edges.clone(),
            reflex: self.reflex.clone(),
            reoriented: self.reoriented,
            bbox: self.bbox,
            tol: self.tol,
            graph,
        }
    }
}

impl PartialEq for PolygonalDomain {
    fn eq(&self, other: &Self) -> bool {
        self.rings == other.rings
    }
}

fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    (0..n).map(|i| ring[i].cross(ring[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Whether closed segments `s` and `t` share a point (exact predicates up to
/// the collinearity tolerance of the caller).
fn segments_touch(s: &Segment, t: &Segment, eps: f64) -> bool {
    if s.distance_to(t.a) <= eps || s.distance_to(t.b) <= eps {
        return true;
    }
    if t.distance_to(s.a) <= eps || t.distance_to(s.b) <= eps {
        return true;
    }
    let d1 = (s.b - s.a).cross(t.a - s.a);
    let d2 = (s.b - s.a).cross(t.b - s.a);
    let d3 = (t.b - t.a).cross(s.a - t.a);
    let d4 = (t.b - t.a).cross(s.b - t.a);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

/// Crossing-number test against a single ring; boundary handling is left to
/// the caller.
fn ring_contains(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

impl PolygonalDomain {
    /// Validates the rings and stores them in canonical orientation.
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Result<Self, DomainError> {
        let mut rings = Vec::with_capacity(1 + holes.len());
        rings.push(outer);
        rings.extend(holes);

        for (r, ring) in rings.iter().enumerate() {
            if ring.len() < 3 {
                return Err(DomainError::invalid(
                    ValidationKind::TooFewVertices,
                    format!("ring {r} has {} vertices", ring.len()),
                ));
            }
            if let Some(p) = ring.iter().find(|p| !p.is_finite()) {
                return Err(DomainError::invalid(
                    ValidationKind::NonFiniteCoordinate,
                    format!("ring {r} has non-finite vertex {p:?}"),
                ));
            }
        }

        let all: Vec<Point> = rings.iter().flatten().copied().collect();
        let mut lo = all[0];
        let mut hi = all[0];
        for p in &all {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let scale = lo.dist(hi);
        if scale == 0.0 {
            return Err(DomainError::invalid(ValidationKind::ZeroArea, "all vertices coincide"));
        }
        let tol = Tolerances::for_scale(scale);

        let mut reoriented = false;
        for (r, ring) in rings.iter_mut().enumerate() {
            let area = signed_area(ring);
            if area.abs() <= tol.eval * scale {
                return Err(DomainError::invalid(ValidationKind::ZeroArea, format!("ring {r} has zero area")));
            }
            let want_ccw = r == 0;
            if (area > 0.0) != want_ccw {
                ring.reverse();
                reoriented = true;
            }
        }

        let mut ring_start = Vec::with_capacity(rings.len() + 1);
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for ring in &rings {
            let base = vertices.len();
            ring_start.push(base);
            vertices.extend_from_slice(ring);
            let n = ring.len();
            for i in 0..n {
                edges.push((base + i, base + (i + 1) % n));
            }
        }
        ring_start.push(vertices.len());

        // Coincident vertices anywhere (consecutive ones included) are rejected.
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                if vertices[i].dist(vertices[j]) <= tol.eval {
                    return Err(DomainError::invalid(
                        ValidationKind::RepeatedVertex,
                        format!("vertices {i} and {j} coincide at {:?}", vertices[i]),
                    ));
                }
            }
        }

        let ring_of = |v: usize| ring_start.iter().rposition(|&s| s <= v).unwrap().min(rings.len() - 1);
        let segs: Vec<Segment> = edges.iter().map(|&(a, b)| Segment::new(vertices[a], vertices[b])).collect();
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (a0, a1) = edges[i];
                let (b0, b1) = edges[j];
                let adjacent = a1 == b0 || b1 == a0;
                if adjacent {
                    // Adjacent edges may only share their common vertex: reject
                    // a fold-back where one edge runs over the other.
                    let (shared, pa, pb) = if a1 == b0 { (a1, a0, b1) } else { (a0, a1, b0) };
                    let u = vertices[pa] - vertices[shared];
                    let w = vertices[pb] - vertices[shared];
                    if u.cross(w).abs() <= 1e-12 * u.norm() * w.norm() && u.dot(w) > 0.0 {
                        return Err(DomainError::invalid(
                            ValidationKind::SelfIntersection,
                            format!("edges {i} and {j} fold back over each other"),
                        ));
                    }
                    continue;
                }
                if segments_touch(&segs[i], &segs[j], tol.eval) {
                    let (ri, rj) = (ring_of(a0), ring_of(b0));
                    let (kind, message) = if ri == rj {
                        (ValidationKind::SelfIntersection, format!("ring {ri} self-intersects (edges {i}, {j})"))
                    } else if ri == 0 || rj == 0 {
                        (ValidationKind::HoleOutsideOuter, format!("hole {} touches or crosses the outer ring", ri.max(rj) - 1))
                    } else {
                        (ValidationKind::OverlappingHoles, format!("holes {} and {} touch or cross", ri - 1, rj - 1))
                    };
                    return Err(DomainError::invalid(kind, message));
                }
            }
        }

        // No crossings remain, so one vertex per ring decides nesting.
        for h in 1..rings.len() {
            if !ring_contains(&rings[0], rings[h][0]) {
                return Err(DomainError::invalid(
                    ValidationKind::HoleOutsideOuter,
                    format!("hole {} lies outside the outer ring", h - 1),
                ));
            }
            for g in 1..rings.len() {
                if g != h && ring_contains(&rings[g], rings[h][0]) {
                    return Err(DomainError::invalid(
                        ValidationKind::OverlappingHoles,
                        format!("hole {} lies inside hole {}", h - 1, g - 1),
                    ));
                }
            }
        }

        let mut reflex = vec![false; vertices.len()];
        for r in 0..rings.len() {
            let (s, e) = (ring_start[r], ring_start[r + 1]);
            let n = e - s;
            for i in 0..n {
                let prev = vertices[s + (i + n - 1) % n];
                let cur = vertices[s + i];
                let next = vertices[s + (i + 1) % n];
                let u = cur - prev;
                let w = next - cur;
                // Interior to the left: a right turn opens an angle above pi.
                reflex[s + i] = u.cross(w) < -1e-12 * u.norm() * w.norm();
            }
        }

        Ok(Self {
            rings,
            vertices,
            ring_start,
            edges,
            reflex,
            reoriented,
            bbox: (lo, hi),
            tol,
            graph: OnceLock::new(),
        })
    }

    pub fn from_json(json: DomainJson) -> Result<Self, DomainError> {
        Self::new(json.outer, json.holes)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn outer(&self) -> &[Point] {
        &self.rings[0]
    }

    pub fn holes(&self) -> &[Vec<Point>] {
        &self.rings[1..]
    }

    pub fn rings(&self) -> &[Vec<Point>] {
        &self.rings
    }

    pub fn vertex(&self, v: VertexId) -> Point {
        self.vertices[v.0]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    /// Ring index of a vertex (0 = outer).
    pub fn ring_of(&self, v: VertexId) -> usize {
        self.ring_start.partition_point(|&s| s <= v.0) - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.edges.iter().map(|&(a, b)| Segment::new(self.vertices[a], self.vertices[b]))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// True when parsing had to reverse at least one ring.
    pub fn was_reoriented(&self) -> bool {
        self.reoriented
    }

    pub fn bbox(&self) -> (Point, Point) {
        self.bbox
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn scale(&self) -> f64 {
        self.tol.scale
    }

    pub fn is_reflex(&self, v: VertexId) -> bool {
        self.reflex[v.0]
    }

    pub fn reflex_vertices(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.reflex[v.0]).collect()
    }

    /// Vertex located at `p` (within the merge tolerance), if any.
    pub fn vertex_at(&self, p: Point) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.dist(p) <= self.tol.merge).map(VertexId)
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.edges().map(|e| e.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        self.distance_to_boundary(p) <= self.tol.eval
    }

    /// Membership in the closed domain; boundary points count as inside.
    pub fn contains(&self, p: Point) -> bool {
        if !p.is_finite() {
            return false;
        }
        let (lo, hi) = self.bbox;
        let e = self.tol.eval;
        if p.x < lo.x - e || p.x > hi.x + e || p.y < lo.y - e || p.y > hi.y + e {
            return false;
        }
        if self.on_boundary(p) {
            return true;
        }
        ring_contains(&self.rings[0], p) && !self.rings[1..].iter().any(|h| ring_contains(h, p))
    }

    /// Whether the closed segment `pq` lies in the closed domain. Running along
    /// the boundary or touching it at isolated points is allowed.
    pub fn segment_visible(&self, p: Point, q: Point) -> bool {
        if !self.contains(p) || !self.contains(q) {
            return false;
        }
        self.segment_clear(p, q)
    }

    /// [`Self::segment_visible`] for endpoints already known to be in the domain.
    pub fn segment_clear(&self, p: Point, q: Point) -> bool {
        let d = q - p;
        let len = d.norm();
        if len <= self.tol.eval {
            return true;
        }
        let eps = self.tol.eval;
        // A transversal crossing through the relative interiors of both the
        // query segment and an edge always leaves the domain.
        for (a, b) in self.edges().map(|e| (e.a, e.b)) {
            let e = b - a;
            let elen = e.norm();
            let da = d.cross(a - p) / len;
            let db = d.cross(b - p) / len;
            if !((da > eps && db < -eps) || (da < -eps && db > eps)) {
                continue;
            }
            let dp = e.cross(p - a) / elen;
            let dq = e.cross(q - a) / elen;
            if (dp > eps && dq < -eps) || (dp < -eps && dq > eps) {
                return false;
            }
        }
        // Remaining contacts are at vertices (or along collinear edges, whose
        // ends are vertices). Split there and test each piece's midpoint.
        let mut cuts: Vec<f64> = vec![0.0, 1.0];
        for &v in &self.vertices {
            let t = (v - p).dot(d) / (len * len);
            if t <= 0.0 || t >= 1.0 {
                continue;
            }
            if (p + d * t).dist(v) <= eps {
                cuts.push(t);
            }
        }
        if cuts.len() == 2 {
            return self.contains(p.lerp(q, 0.5));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .filter(|w| (w[1] - w[0]) * len > eps)
            .all(|w| self.contains(p.lerp(q, 0.5 * (w[0] + w[1]))))
    }

    /// The visibility graph over all vertices, built on first use.
    pub fn visibility_graph(&self) -> &VisibilityGraph {
        self.graph.get_or_init(|| VisibilityGraph::build(self))
    }

    pub fn to_json(&self) -> DomainJson {
        DomainJson { outer: self.rings[0].clone(), holes: self.rings[1..].to_vec() }
    }

    /// Canonical form: canonical orientation, each ring starting at its
    /// lexicographically smallest vertex.
    pub fn canonical_json(&self) -> DomainJson {
        let rotate = |ring: &Vec<Point>| {
            let k = (0..ring.len()).min_by(|&i, &j| ring[i].lex_cmp(&ring[j])).unwrap_or(0);
            let mut r = ring.clone();
            r.rotate_left(k);
            r
        };
        DomainJson { outer: rotate(&self.rings[0]), holes: self.rings[1..].iter().map(rotate).collect() }
    }

    pub fn serialize_canonical(&self) -> String {
        serde_json::to_string(&self.canonical_json()).expect("domain JSON is always serializable")
    }
}

/// Parses and validates a domain from its JSON text.
pub fn parse_domain(text: &[u8]) -> Result<PolygonalDomain, DomainError> {
    let json: DomainJson = serde_json::from_slice(text).map_err(|e| DomainError::Parse(e.to_string()))?;
    PolygonalDomain::from_json(json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn unit_square() -> PolygonalDomain {
        PolygonalDomain::new(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), vec![]).unwrap()
    }

    fn slit_fixture() -> PolygonalDomain {
        PolygonalDomain::new(
            pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]),
            vec![pts(&[(1.9, 0.5), (2.1, 0.5), (2.1, 3.5), (1.9, 3.5)])],
        )
        .unwrap()
    }

    #[test]
    fn parse_counts() {
        let d = parse_domain(br#"{"outer": [[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(d.n(), 4);
        assert!(d.holes().is_empty());
        let d = parse_domain(br#"{"outer": [[0,0],[4,0],[4,4],[0,4]], "holes": [[[1,1],[2,1],[1,2]]]}"#).unwrap();
        assert_eq!(d.n(), 7);
        assert!(d.was_reoriented());
    }

    #[test]
    fn parse_errors() {
        let err = parse_domain(br#"{"outer": [[0,0],[4,0],[4,4],[0,4]], "holes": [[[3,1],[5,1],[3,2]]]}"#).unwrap_err();
        assert!(matches!(err, DomainError::Validation { kind: ValidationKind::HoleOutsideOuter, .. }));
        let err = parse_domain(br#"{"outer": [[0,0],[4,0]]}"#).unwrap_err();
        assert!(matches!(err, DomainError::Validation { kind: ValidationKind::TooFewVertices, .. }));
        let err = parse_domain(br#"{"outer": [[0,0],[4,4],[4,0],[0,3]]}"#).unwrap_err();
        assert!(matches!(err, DomainError::Validation { kind: ValidationKind::SelfIntersection, .. }));
        let err = parse_domain(br#"{"outer": [[0,0],[8,0],[8,8],[0,8]], "holes": [[[1,1],[4,1],[4,4],[1,4]], [[3,3],[6,3],[6,6],[3,6]]]}"#).unwrap_err();
        assert!(matches!(err, DomainError::Validation { kind: ValidationKind::OverlappingHoles, .. }));
        let err = parse_domain(br#"{"outer": [[0,0],[8,0],[8,8],[0,8]], "holes": [[[1,1],[7,1],[7,7],[1,7]], [[3,3],[4,3],[4,4]]]}"#).unwrap_err();
        assert!(matches!(err, DomainError::Validation { kind: ValidationKind::OverlappingHoles, .. }));
        assert!(matches!(parse_domain(b"{"), Err(DomainError::Parse(_))));
    }

    #[test]
    fn contains_examples() {
        let d = unit_square();
        assert!(d.contains(Point::new(0.5, 0.5)));
        assert!(d.contains(Point::new(0.5, 0.0)));
        assert!(!d.contains(Point::new(1.5, 0.5)));
        let h = PolygonalDomain::new(
            pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]),
            vec![pts(&[(1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0)])],
        )
        .unwrap();
        assert!(!h.contains(Point::new(2.0, 2.0)));
        assert!(h.contains(Point::new(1.0, 2.0)));
    }

    #[test]
    fn visibility_examples() {
        let d = unit_square();
        assert!(d.segment_visible(Point::new(0.0, 0.0), Point::new(1.0, 1.0)));
        assert!(d.segment_visible(Point::new(0.0, 0.0), Point::new(1.0, 0.0)));
        let h = slit_fixture();
        assert!(!h.segment_visible(Point::new(0.0, 2.0), Point::new(4.0, 2.0)));
        // Grazing a hole corner.
        assert!(h.segment_visible(Point::new(1.9, 0.0), Point::new(1.9, 0.5)));
        assert!(h.segment_visible(Point::new(0.0, 0.5), Point::new(4.0, 0.5)));
        assert!(h.segment_visible(Point::new(1.7, 0.1), Point::new(2.1, 0.9)) == false);
    }

    #[test]
    fn reflex_examples() {
        assert!(unit_square().reflex_vertices().is_empty());
        let h = slit_fixture();
        assert_eq!(h.reflex_vertices(), vec![VertexId(4), VertexId(5), VertexId(6), VertexId(7)]);
        let l = PolygonalDomain::new(
            pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]),
            vec![],
        )
        .unwrap();
        assert_eq!(l.reflex_vertices(), vec![VertexId(3)]);
    }

    #[test]
    fn collinear_vertices_are_kept_and_not_reflex() {
        let d = PolygonalDomain::new(pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]), vec![]).unwrap();
        assert_eq!(d.n(), 5);
        assert!(d.reflex_vertices().is_empty());
    }

    #[test]
    fn canonical_round_trip() {
        let d = parse_domain(br#"{"outer": [[1,0],[1,1],[0,1],[0,0]], "holes": [[[0.25,0.25],[0.25,0.5],[0.5,0.5]]]}"#).unwrap();
        let text = d.serialize_canonical();
        let back = parse_domain(text.as_bytes()).unwrap();
        assert_eq!(back.serialize_canonical(), text);
        assert_eq!(back.outer()[0], Point::new(0.0, 0.0));
    }
}
