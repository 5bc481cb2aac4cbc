//! Candidate diameter endpoints.
//!
//! Besides the domain vertices, an endpoint of the diameter is a vertex of
//! the shortest path map from some domain vertex (a boundary foot or a triple
//! point), or a crossing of two bisector arcs taken from two different maps.
//! The crossings that can matter are those singled out by plausible 5-tuples
//! of vertices, tested in constant time against the bisector-adjacency array.

use std::collections::{BTreeMap, HashMap};

use bitvec::vec::BitVec;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{PolygonalDomain, VertexId};
use crate::geom::{intersect_curves_in, Point};
use crate::spm::{BisectorArc, ShortestPathMap, SpmVertexKind};

/// `b[i][j][k]` is set when vertices `i` and `j` share a bisector arc in the
/// map from vertex `k`. The map source stands for vertex `k` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectorAdjacency {
    n: usize,
    bits: BitVec,
}

impl BisectorAdjacency {
    pub fn new(n: usize) -> Self {
        Self { n, bits: BitVec::repeat(false, n * n * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.bits[self.index(i, j, k)]
    }

    /// Sets `b[i][j][k]` and `b[j][i][k]`. Diagonal entries stay clear.
    pub fn set(&mut self, i: usize, j: usize, k: usize) {
        if i == j {
            return;
        }
        let (a, b) = (self.index(i, j, k), self.index(j, i, k));
        self.bits.set(a, true);
        self.bits.set(b, true);
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    /// Ordered pairs `(i, j)` with `b[i][j][k]` set.
    pub fn pairs_in(&self, k: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j, k) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn bisector_adjacency(d: &PolygonalDomain, maps: &[ShortestPathMap]) -> BisectorAdjacency {
    let n = d.n();
    assert_eq!(maps.len(), n, "one map per domain vertex");
    let mut b = BisectorAdjacency::new(n);
    for (k, map) in maps.iter().enumerate() {
        debug_assert_eq!(map.source_vertex, Some(VertexId(k)));
        for arc in &map.arcs {
            if let (Some(i), Some(j)) = (map.anchor_vertex(arc.anchors[0]), map.anchor_vertex(arc.anchors[1])) {
                b.set(i.0, j.0, k);
            }
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PlausibleTuple {
    pub u1: VertexId,
    pub u2: VertexId,
    pub u3: VertexId,
    pub v2: VertexId,
    pub v3: VertexId,
}

impl PlausibleTuple {
    fn is_plausible(b: &BisectorAdjacency, t: [usize; 5]) -> bool {
        let [u1, u2, u3, v2, v3] = t;
        u1 != u3 && v2 != v3 && b.get(u1, u2, v2) && b.get(u2, u3, v3) && b.get(v2, v3, u2)
    }

    fn from_indices([u1, u2, u3, v2, v3]: [usize; 5]) -> Self {
        Self { u1: VertexId(u1), u2: VertexId(u2), u3: VertexId(u3), v2: VertexId(v2), v3: VertexId(v3) }
    }
}

/// All plausible 5-tuples, sorted. For each middle vertex `u2` the pairs
/// `(v2, v3)` tied in its map are listed first, then the outer vertices.
pub fn plausible_tuples(b: &BisectorAdjacency) -> Vec<PlausibleTuple> {
    let n = b.n();
    let mut out: Vec<PlausibleTuple> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u2| {
            let mut found = Vec::new();
            for (v2, v3) in b.pairs_in(u2) {
                let firsts: Vec<usize> = (0..n).filter(|&u1| b.get(u1, u2, v2)).collect();
                let thirds: Vec<usize> = (0..n).filter(|&u3| b.get(u2, u3, v3)).collect();
                for &u1 in &firsts {
                    for &u3 in &thirds {
                        if u1 != u3 {
                            found.push(PlausibleTuple::from_indices([u1, u2, u3, v2, v3]));
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.sort_unstable();
    out
}

/// Reference enumeration over all `n^5` index tuples.
pub fn plausible_tuples_brute(b: &BisectorAdjacency) -> Vec<PlausibleTuple> {
    let n = b.n();
    let mut out = Vec::new();
    for u1 in 0..n {
        for u2 in 0..n {
            for u3 in 0..n {
                for v2 in 0..n {
                    for v3 in 0..n {
                        if PlausibleTuple::is_plausible(b, [u1, u2, u3, v2, v3]) {
                            out.push(PlausibleTuple::from_indices([u1, u2, u3, v2, v3]));
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    DomainVertex { vertex: VertexId },
    BoundaryFoot { source: VertexId },
    TriplePoint { source: VertexId },
    PlausibleNode { tuple: PlausibleTuple },
}

impl Provenance {
    /// Rank used for tie-breaking: vertices first, plausible nodes last.
    pub fn class(&self) -> u8 {
        match self {
            Provenance::DomainVertex { .. } => 0,
            Provenance::BoundaryFoot { .. } => 1,
            Provenance::TriplePoint { .. } => 2,
            Provenance::PlausibleNode { .. } => 3,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            Provenance::DomainVertex { .. } => "domain_vertex",
            Provenance::BoundaryFoot { .. } => "boundary_foot",
            Provenance::TriplePoint { .. } => "triple_point",
            Provenance::PlausibleNode { .. } => "plausible_node",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CandidatePoint {
    pub location: Point,
    pub provenance: Provenance,
}

/// Grid-bucketed set of points for merging within a tolerance.
pub(crate) struct PointSet {
    eps: f64,
    cells: HashMap<(i64, i64), Vec<Point>>,
}

impl PointSet {
    pub(crate) fn new(eps: f64) -> Self {
        Self { eps: eps.max(f64::MIN_POSITIVE), cells: HashMap::new() }
    }

    fn cell(&self, p: Point) -> (i64, i64) {
        ((p.x / self.eps).floor() as i64, (p.y / self.eps).floor() as i64)
    }

    /// Inserts `p` unless a stored point lies within the tolerance; returns
    /// whether it was inserted.
    pub(crate) fn insert(&mut self, p: Point) -> bool {
        let (cx, cy) = self.cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.cells.get(&(cx + dx, cy + dy)) {
                    if v.iter().any(|q| q.dist(p) <= self.eps) {
                        return false;
                    }
                }
            }
        }
        self.cells.entry((cx, cy)).or_default().push(p);
        true
    }
}

fn boxes_overlap(a: (Point, Point), b: (Point, Point), eps: f64) -> bool {
    a.0.x <= b.1.x + eps && b.0.x <= a.1.x + eps && a.0.y <= b.1.y + eps && b.0.y <= a.1.y + eps
}

/// Crossings of two arcs that lie in the domain.
pub fn arc_intersections(d: &PolygonalDomain, a: &BisectorArc, b: &BisectorArc) -> Vec<Point> {
    let tol = d.tolerances();
    let (ba, bb) = (a.bbox(), b.bbox());
    if !boxes_overlap(ba, bb, tol.merge) {
        return Vec::new();
    }
    let lo = Point::new(ba.0.x.max(bb.0.x), ba.0.y.max(bb.0.y));
    let hi = Point::new(ba.1.x.min(bb.1.x), ba.1.y.min(bb.1.y));
    let center = lo.lerp(hi, 0.5);
    let half_width = 0.5 * (hi.x - lo.x).max(hi.y - lo.y).max(0.0) + tol.merge;
    let Ok(points) = intersect_curves_in(&a.curve, &b.curve, center, half_width, tol.eval, tol.merge) else {
        return Vec::new();
    };
    let on_arc = |arc: &BisectorArc, x: Point| {
        let s = arc.curve.param_of(x);
        s >= arc.params.0 - tol.merge && s <= arc.params.1 + tol.merge
    };
    points.into_iter().filter(|&x| on_arc(a, x) && on_arc(b, x) && d.contains(x)).collect()
}

/// Arc indices of each map keyed by the (unordered) vertex pair of their
/// anchors.
fn arcs_by_vertex_pair(maps: &[ShortestPathMap]) -> Vec<HashMap<(usize, usize), Vec<usize>>> {
    maps.iter()
        .map(|map| {
            let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
            for (idx, arc) in map.arcs.iter().enumerate() {
                if let (Some(i), Some(j)) = (map.anchor_vertex(arc.anchors[0]), map.anchor_vertex(arc.anchors[1])) {
                    by_pair.entry((i.0.min(j.0), i.0.max(j.0))).or_default().push(idx);
                }
            }
            by_pair
        })
        .collect()
}

/// Crossings of the `{u1, u2}` arcs in the map from `v2` with the `{u2, u3}`
/// arcs in the map from `v3`, merged within the merge tolerance. Each node
/// keeps the smallest tuple that produced it.
pub fn plausible_nodes(d: &PolygonalDomain, maps: &[ShortestPathMap], tuples: &[PlausibleTuple]) -> Vec<CandidatePoint> {
    let index = arcs_by_vertex_pair(maps);
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    // Each unordered pair of arcs is intersected once, on behalf of the
    // smallest tuple that names it.
    let mut jobs: BTreeMap<((usize, usize), (usize, usize)), PlausibleTuple> = BTreeMap::new();
    for t in tuples {
        let (Some(first), Some(second)) =
            (index[t.v2.0].get(&key(t.u1.0, t.u2.0)), index[t.v3.0].get(&key(t.u2.0, t.u3.0)))
        else {
            continue;
        };
        for &x in first {
            for &y in second {
                let (p, q) = ((t.v2.0, x), (t.v3.0, y));
                if p == q {
                    continue;
                }
                let e = jobs.entry((p.min(q), p.max(q))).or_insert(*t);
                if t < e {
                    *e = *t;
                }
            }
        }
    }
    let jobs: Vec<_> = jobs.into_iter().collect();
    let mut found: Vec<(PlausibleTuple, Point)> = jobs
        .par_iter()
        .flat_map_iter(|&(((m1, a1), (m2, a2)), tuple)| {
            arc_intersections(d, &maps[m1].arcs[a1], &maps[m2].arcs[a2]).into_iter().map(move |x| (tuple, x))
        })
        .collect();
    found.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.lex_cmp(&b.1)));
    let mut seen = PointSet::new(d.tolerances().merge);
    found
        .into_iter()
        .filter(|&(_, x)| seen.insert(x))
        .map(|(tuple, location)| CandidatePoint { location, provenance: Provenance::PlausibleNode { tuple } })
        .collect()
}

fn map_vertices_of(maps: &[ShortestPathMap], kind: SpmVertexKind) -> Vec<CandidatePoint> {
    maps.iter()
        .enumerate()
        .flat_map(|(k, map)| {
            let source = map.source_vertex.unwrap_or(VertexId(k));
            map.vertices_of_kind(kind).map(move |v| CandidatePoint {
                location: v.location,
                provenance: match kind {
                    SpmVertexKind::TriplePoint => Provenance::TriplePoint { source },
                    _ => Provenance::BoundaryFoot { source },
                },
            })
        })
        .collect()
}

pub fn triple_point_candidates(maps: &[ShortestPathMap]) -> Vec<CandidatePoint> {
    map_vertices_of(maps, SpmVertexKind::TriplePoint)
}

pub fn boundary_foot_candidates(maps: &[ShortestPathMap]) -> Vec<CandidatePoint> {
    map_vertices_of(maps, SpmVertexKind::BoundaryFoot)
}

pub fn vertex_candidates(d: &PolygonalDomain) -> Vec<CandidatePoint> {
    d.vertex_ids()
        .map(|v| CandidatePoint { location: d.vertex(v), provenance: Provenance::DomainVertex { vertex: v } })
        .collect()
}

/// Crossings of arcs from different maps, merged within the merge
/// tolerance. Quadratic in the total arc count; meant for small domains.
pub fn overlay_nodes(d: &PolygonalDomain, maps: &[ShortestPathMap]) -> Vec<Point> {
    let arcs: Vec<(usize, &BisectorArc, (Point, Point))> =
        maps.iter().enumerate().flat_map(|(k, m)| m.arcs.iter().map(move |a| (k, a, a.bbox()))).collect();
    let merge = d.tolerances().merge;
    let mut found: Vec<Point> = (0..arcs.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (mi, ai, bi) = arcs[i];
            arcs[i + 1..]
                .iter()
                .filter(move |(mj, _, bj)| *mj != mi && boxes_overlap(bi, *bj, merge))
                .flat_map(move |(_, aj, _)| arc_intersections(d, ai, aj))
                .collect::<Vec<_>>()
        })
        .collect();
    found.sort_by(Point::lex_cmp);
    let mut seen = PointSet::new(merge);
    found.retain(|&x| seen.insert(x));
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::spm::build_spm;

    fn all_maps(d: &PolygonalDomain) -> Vec<ShortestPathMap> {
        d.vertex_ids().map(|v| build_spm(d, d.vertex(v)).unwrap()).collect()
    }

    #[test]
    fn convex_domain_has_no_candidates_beyond_vertices() {
        let d = fixtures::convex_hexagon();
        let maps = all_maps(&d);
        let b = bisector_adjacency(&d, &maps);
        assert_eq!(b.count_ones(), 0);
        assert!(plausible_tuples(&b).is_empty());
        assert!(triple_point_candidates(&maps).is_empty());
        assert!(boundary_foot_candidates(&maps).is_empty());
        assert!(overlay_nodes(&d, &maps).is_empty());
        assert!(plausible_nodes(&d, &maps, &[]).is_empty());
    }

    #[test]
    fn handcrafted_adjacency() {
        let mut b = BisectorAdjacency::new(5);
        b.set(0, 1, 3);
        b.set(1, 2, 4);
        b.set(3, 4, 1);
        assert!(b.get(1, 0, 3) && b.get(4, 3, 1));
        let fast = plausible_tuples(&b);
        let brute = plausible_tuples_brute(&b);
        assert_eq!(fast, brute);
        let t = |a, b, c, d, e| PlausibleTuple::from_indices([a, b, c, d, e]);
        assert_eq!(fast, vec![t(0, 1, 2, 3, 4), t(2, 1, 0, 4, 3)]);
    }

    #[test]
    fn slit_adjacency_and_feet() {
        let d = fixtures::slit();
        let maps = all_maps(&d);
        let b = bisector_adjacency(&d, &maps);
        for i in 0..d.n() {
            for j in 0..d.n() {
                for k in 0..d.n() {
                    assert_eq!(b.get(i, j, k), b.get(j, i, k));
                }
            }
        }
        // From the corner (0,0) the paths around both ends of the hole meet
        // on its right side.
        let feet = boundary_foot_candidates(&maps);
        assert!(feet.iter().any(|c| c.provenance == Provenance::BoundaryFoot { source: VertexId(0) }
            && (c.location.x - 2.1).abs() < 1e-9
            && c.location.y > 2.0));
        for c in &feet {
            assert!(d.on_boundary(c.location));
        }
        assert_eq!(plausible_tuples(&b), plausible_tuples_brute(&b));
    }
}
