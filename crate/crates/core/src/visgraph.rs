//! Visibility graph over the domain vertices and the exact geodesic distance
//! engine built on it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{PolygonalDomain, VertexId};
use crate::geom::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VisError {
    #[error("vertex {0} is unreachable from the source")]
    UnreachableVertex(VertexId),
}

#[derive(Clone, Debug)]
pub struct VisibilityGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl VisibilityGraph {
    /// O(n^2) visibility tests, each O(n).
    pub fn build(d: &PolygonalDomain) -> Self {
        let n = d.n();
        let pts = d.vertices();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if d.segment_clear(pts[i], pts[j]) {
                    let len = pts[i].dist(pts[j]);
                    adjacency[i].push((j, len));
                    adjacency[j].push((i, len));
                }
            }
        }
        Self { adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(usize, f64)] {
        &self.adjacency[v.0]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency[a.0].iter().any(|&(j, _)| j == b.0)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Builds (or fetches the cached) visibility graph of `d`.
pub fn build_visibility_graph(d: &PolygonalDomain) -> VisibilityGraph {
    d.visibility_graph().clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predecessor {
    Source,
    Vertex(VertexId),
}

impl Predecessor {
    fn rank(self) -> (u8, usize) {
        match self {
            Predecessor::Source => (0, 0),
            Predecessor::Vertex(v) => (1, v.0),
        }
    }
}

/// Geodesic distances from one source point to every domain vertex.
#[derive(Clone, Debug)]
pub struct SourceDistances {
    pub source: Point,
    dist: Vec<f64>,
    pred: Vec<Predecessor>,
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, node).
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact geodesic distances from `s` to all vertices (Dijkstra over the
/// visibility graph augmented with `s`). Among equal-length routes the
/// predecessor with the smaller id wins (the source first).
pub fn single_source_distances(d: &PolygonalDomain, s: Point) -> Result<SourceDistances, VisError> {
    let n = d.n();
    let graph = d.visibility_graph();
    let tol = d.tolerances().eval;
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<Predecessor>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();

    let relax = |v: usize, nd: f64, p: Predecessor, dist: &mut Vec<f64>, pred: &mut Vec<Option<Predecessor>>| -> bool {
        let better = nd < dist[v] - tol
            || (nd <= dist[v] + tol && pred[v].map_or(true, |old| p.rank() < old.rank()));
        if better {
            dist[v] = nd;
            pred[v] = Some(p);
        }
        better
    };

    for (v, &pt) in d.vertices().iter().enumerate() {
        if d.segment_clear(s, pt) && relax(v, s.dist(pt), Predecessor::Source, &mut dist, &mut pred) {
            heap.push(HeapEntry { dist: dist[v], node: v });
        }
    }
    while let Some(HeapEntry { dist: du, node: u }) = heap.pop() {
        if done[u] || du > dist[u] {
            continue;
        }
        done[u] = true;
        for &(v, len) in graph.neighbors(VertexId(u)) {
            if done[v] {
                continue;
            }
            if relax(v, du + len, Predecessor::Vertex(VertexId(u)), &mut dist, &mut pred) {
                heap.push(HeapEntry { dist: dist[v], node: v });
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for (v, p) in pred.into_iter().enumerate() {
        out.push(p.ok_or(VisError::UnreachableVertex(VertexId(v)))?);
    }
    Ok(SourceDistances { source: s, dist, pred: out })
}

impl SourceDistances {
    pub fn distance(&self, v: VertexId) -> f64 {
        self.dist[v.0]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn predecessor(&self, v: VertexId) -> Predecessor {
        self.pred[v.0]
    }

    /// Vertex chain from the first bend to `v` inclusive.
    pub fn vertex_chain(&self, v: VertexId) -> Vec<VertexId> {
        let mut chain = vec![v];
        let mut cur = v;
        while let Predecessor::Vertex(p) = self.pred[cur.0] {
            chain.push(p);
            cur = p;
            if chain.len() > self.pred.len() {
                break;
            }
        }
        chain.reverse();
        chain
    }

    /// Geodesic distance from the source to an arbitrary point of the domain,
    /// with the last vertex of a shortest route (`None` for a direct segment).
    pub fn distance_to_point(&self, d: &PolygonalDomain, x: Point) -> (f64, Option<VertexId>) {
        let direct = self.source.dist(x);
        if d.segment_clear(self.source, x) {
            return (direct, None);
        }
        let pts = d.vertices();
        // Cheapest lower bounds first; stop once no remaining vertex can win.
        let mut order: Vec<(f64, usize)> = (0..pts.len()).map(|v| (self.dist[v] + pts[v].dist(x), v)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let tol = d.tolerances().eval;
        let mut best: Option<(f64, usize)> = None;
        for (value, v) in order {
            match best {
                Some((bv, _)) if value > bv + tol => break,
                Some((_, bi)) if v > bi => continue,
                _ => {}
            }
            if d.segment_clear(pts[v], x) {
                best = Some((best.map_or(value, |b| b.0), v));
            }
        }
        match best {
            Some((value, v)) => (value, Some(VertexId(v))),
            None => (f64::INFINITY, None),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub waypoints: Vec<Point>,
    pub length: f64,
    /// Domain vertices at the interior waypoints, in order.
    pub bends: Vec<VertexId>,
}

impl GeodesicPath {
    fn from_points(waypoints: Vec<Point>, bends: Vec<VertexId>) -> Self {
        let length = waypoints.windows(2).map(|w| w[0].dist(w[1])).sum();
        Self { waypoints, length, bends }
    }
}

/// A shortest `p`-`q` path. Straight-through bends are removed so every
/// interior waypoint is a genuine turn at a domain vertex.
pub fn geodesic_distance(d: &PolygonalDomain, p: Point, q: Point) -> GeodesicPath {
    let tol = d.tolerances().eval;
    if p.dist(q) <= tol {
        return GeodesicPath::from_points(vec![p], vec![]);
    }
    if d.segment_clear(p, q) {
        return GeodesicPath::from_points(vec![p, q], vec![]);
    }
    let field = match single_source_distances(d, p) {
        Ok(f) => f,
        Err(_) => return GeodesicPath { waypoints: vec![p, q], length: f64::INFINITY, bends: vec![] },
    };
    let (_, last) = field.distance_to_point(d, q);
    let Some(last) = last else {
        return GeodesicPath { waypoints: vec![p, q], length: f64::INFINITY, bends: vec![] };
    };
    let chain = field.vertex_chain(last);
    let mut pts = Vec::with_capacity(chain.len() + 2);
    pts.push(p);
    pts.extend(chain.iter().map(|&v| d.vertex(v)));
    pts.push(q);
    let mut bends = chain;
    tighten(d, &mut pts, &mut bends);
    GeodesicPath::from_points(pts, bends)
}

/// Drops interior waypoints that do not bend the path.
fn tighten(d: &PolygonalDomain, pts: &mut Vec<Point>, bends: &mut Vec<VertexId>) {
    let tol = d.tolerances().eval;
    let mut i = 1;
    while i + 1 < pts.len() {
        let (a, b, c) = (pts[i - 1], pts[i], pts[i + 1]);
        let detour = a.dist(b) + b.dist(c) - a.dist(c);
        if detour <= tol && d.segment_clear(a, c) {
            pts.remove(i);
            bends.remove(i - 1);
            i = i.saturating_sub(1).max(1);
        } else {
            i += 1;
        }
    }
}

/// All-pairs vertex geodesic distances.
pub fn vertex_distance_matrix(d: &PolygonalDomain) -> Vec<Vec<f64>> {
    d.vertex_ids()
        .map(|v| {
            single_source_distances(d, d.vertex(v))
                .map(|f| f.distances().to_vec())
                .unwrap_or_else(|_| vec![f64::INFINITY; d.n()])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn slit() -> PolygonalDomain {
        PolygonalDomain::new(
            pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]),
            vec![pts(&[(1.9, 0.5), (2.1, 0.5), (2.1, 3.5), (1.9, 3.5)])],
        )
        .unwrap()
    }

    #[test]
    fn convex_graph_is_complete() {
        let d = PolygonalDomain::new(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), vec![]).unwrap();
        let g = build_visibility_graph(&d);
        assert_eq!(g.edge_count(), 6);
        let t = PolygonalDomain::new(pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]), vec![]).unwrap();
        assert_eq!(build_visibility_graph(&t).edge_count(), 3);
    }

    #[test]
    fn hole_blocks_diagonals() {
        let d = PolygonalDomain::new(
            pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]),
            vec![pts(&[(1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0)])],
        )
        .unwrap();
        let g = build_visibility_graph(&d);
        assert!(!g.has_edge(VertexId(0), VertexId(2)));
        assert!(!g.has_edge(VertexId(1), VertexId(3)));
        assert!(g.has_edge(VertexId(0), VertexId(1)));
        // Hole diagonals cross the hole interior.
        assert!(!g.has_edge(VertexId(4), VertexId(6)));
        assert!(g.has_edge(VertexId(0), VertexId(4)));
    }

    #[test]
    fn square_corner_distances() {
        let d = PolygonalDomain::new(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), vec![]).unwrap();
        let f = single_source_distances(&d, Point::new(0.0, 0.0)).unwrap();
        let want = [0.0, 1.0, 2f64.sqrt(), 1.0];
        for (v, w) in want.iter().enumerate() {
            assert!((f.distance(VertexId(v)) - w).abs() < 1e-15);
        }
    }

    #[test]
    fn slit_distances_and_path() {
        let d = slit();
        let f = single_source_distances(&d, Point::new(0.0, 2.0)).unwrap();
        // Vertex (2.1, 0.5) is reached around the corner (1.9, 0.5).
        let v = d.vertex_at(Point::new(2.1, 0.5)).unwrap();
        let want = (1.9f64 * 1.9 + 1.5 * 1.5).sqrt() + 0.2;
        assert!((f.distance(v) - want).abs() < 1e-12);

        let path = geodesic_distance(&d, Point::new(0.0, 2.0), Point::new(4.0, 2.0));
        let want = 2.0 * (1.9f64 * 1.9 + 1.5 * 1.5).sqrt() + 0.2;
        assert!((path.length - want).abs() < 1e-12, "{}", path.length);
        assert_eq!(path.waypoints.len(), 4);
        assert!(path.bends.iter().all(|&b| d.is_reflex(b)));
    }

    #[test]
    fn trivial_paths() {
        let d = PolygonalDomain::new(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), vec![]).unwrap();
        let p = Point::new(0.0, 0.0);
        let path = geodesic_distance(&d, p, Point::new(1.0, 1.0));
        assert_eq!(path.waypoints.len(), 2);
        assert!((path.length - 2f64.sqrt()).abs() < 1e-15);
        let path = geodesic_distance(&d, p, p);
        assert_eq!(path.waypoints, vec![p]);
        assert_eq!(path.length, 0.0);
        let f = single_source_distances(&d, Point::new(1.0, 0.0)).unwrap();
        assert_eq!(f.distance(VertexId(1)), 0.0);
    }
}
