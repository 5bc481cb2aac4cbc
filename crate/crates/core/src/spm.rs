//! Shortest path maps.
//!
//! The map from a source `s` partitions the domain by the last anchor of a
//! shortest path: the source itself or a reflex vertex `v`, weighted by the
//! geodesic distance `d(s, v)`. The geodesic distance at `x` is the smallest
//! `weight + |anchor x|` over anchors visible from `x`; the map edges are the
//! pieces of weighted bisectors where two anchors in different directions
//! from `x` jointly attain that minimum.
//!
//! Construction is a brute-force lower envelope. For every anchor pair the
//! bisector is cut at its crossings with the boundary and with the shadow
//! rays of both anchors, which leaves pieces on which both anchors are
//! visible; those pieces are cut again at the ties with every third anchor,
//! and the pieces no third anchor undercuts become arcs. Arc endpoints are
//! classified into boundary feet and triple points by the set of tied
//! anchor directions there.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{PolygonalDomain, VertexId};
use crate::geom::{
    isolate_roots, line_tie_params, make_bisector_with_tolerance, weighted_circumcenters, BisectorCurve, BisectorKind, Point, Segment,
    WeightedSite,
};
use crate::visgraph::{geodesic_distance, single_source_distances, VisError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpmError {
    #[error("source {0:?} lies outside the domain")]
    SourceOutside(Point),
    #[error(transparent)]
    Unreachable(#[from] VisError),
    #[error("farthest point {point:?}: map distance {map} disagrees with geodesic distance {geodesic}")]
    Inconsistent { point: Point, map: f64, geodesic: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorId {
    Source,
    Vertex(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Anchor {
    pub id: AnchorId,
    pub position: Point,
    pub weight: f64,
}

impl Anchor {
    #[inline]
    pub fn value_at(&self, x: Point) -> f64 {
        self.weight + self.position.dist(x)
    }

    fn site(&self) -> WeightedSite {
        WeightedSite::new(self.position, self.weight)
    }
}

/// A piece of a weighted bisector that is an edge of the map.
#[derive(Clone, Debug, PartialEq)]
pub struct BisectorArc {
    /// Defining anchors, in increasing id order.
    pub anchors: [AnchorId; 2],
    pub curve: BisectorCurve,
    /// Curve parameter interval of the arc.
    pub params: (f64, f64),
    pub start: Point,
    pub end: Point,
}

impl BisectorArc {
    pub fn point_at(&self, t: f64) -> Point {
        let (lo, hi) = self.params;
        self.curve.point_at(lo + (hi - lo) * t)
    }

    /// Polyline with `segments` pieces, uniform in the curve parameter.
    pub fn polyline(&self, segments: usize) -> Vec<Point> {
        let k = segments.max(1);
        (0..=k).map(|i| self.point_at(i as f64 / k as f64)).collect()
    }

    pub fn bbox(&self) -> (Point, Point) {
        self.curve.param_bbox(self.params.0, self.params.1)
    }

    pub fn has_anchors(&self, a: AnchorId, b: AnchorId) -> bool {
        (self.anchors[0] == a && self.anchors[1] == b) || (self.anchors[0] == b && self.anchors[1] == a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SpmVertexKind {
    DomainVertex,
    BoundaryFoot,
    TriplePoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpmVertex {
    pub location: Point,
    pub kind: SpmVertexKind,
    /// Anchors tied at the location, in increasing id order.
    pub anchors: Vec<AnchorId>,
    pub source_vertex: Option<VertexId>,
}

/// Counters for numerically delicate situations met during construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpmStats {
    /// Anchor pairs whose bisector was cut at more than four ties with a
    /// single third anchor.
    pub excess_roots: usize,
    /// Tie points with four or more distinct anchor directions.
    pub multi_ties: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPathMap {
    pub source: Point,
    /// Set when the source is a domain vertex.
    pub source_vertex: Option<VertexId>,
    /// `anchors[0]` is the source.
    pub anchors: Vec<Anchor>,
    pub arcs: Vec<BisectorArc>,
    pub vertices: Vec<SpmVertex>,
    pub stats: SpmStats,
}

impl ShortestPathMap {
    pub fn anchor(&self, id: AnchorId) -> Option<&Anchor> {
        self.anchors.iter().find(|a| a.id == id)
    }

    /// Domain vertex behind an anchor id; the source maps to its vertex when
    /// it is one.
    pub fn anchor_vertex(&self, id: AnchorId) -> Option<VertexId> {
        match id {
            AnchorId::Source => self.source_vertex,
            AnchorId::Vertex(v) => Some(v),
        }
    }

    pub fn vertices_of_kind(&self, kind: SpmVertexKind) -> impl Iterator<Item = &SpmVertex> + '_ {
        self.vertices.iter().filter(move |v| v.kind == kind)
    }

    /// Number of arcs plus non-domain-vertex map vertices.
    pub fn complexity(&self) -> usize {
        self.arcs.len() + self.vertices.iter().filter(|v| v.kind != SpmVertexKind::DomainVertex).count()
    }

    /// `(distance, anchor)` at `x`: the smallest weighted distance over visible
    /// anchors, ties going to the smallest id.
    pub fn eval(&self, d: &PolygonalDomain, x: Point) -> (f64, AnchorId) {
        let tol = d.tolerances().tie;
        let mut order: Vec<(f64, usize)> = self.anchors.iter().map(|a| a.value_at(x)).enumerate().map(|(i, v)| (v, i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(f64, AnchorId)> = None;
        for (value, i) in order {
            let anchor = &self.anchors[i];
            match best {
                Some((bv, _)) if value > bv + tol => break,
                Some((_, bid)) if anchor.id > bid => continue,
                _ => {}
            }
            if d.segment_clear(anchor.position, x) {
                best = Some((best.map_or(value, |b| b.0), anchor.id));
            }
        }
        best.unwrap_or((f64::INFINITY, AnchorId::Source))
    }
}

/// `(distance, anchor)` of the map at `x`.
pub fn spm_eval(d: &PolygonalDomain, map: &ShortestPathMap, x: Point) -> (f64, AnchorId) {
    map.eval(d, x)
}

struct Builder<'a> {
    d: &'a PolygonalDomain,
    anchors: Vec<Anchor>,
    /// Shadow rays per anchor: from each visible vertex, pointing away from
    /// the anchor, long enough to leave the bounding box.
    shadows: Vec<Vec<Segment>>,
    edges: Vec<Segment>,
    stats: SpmStats,
}

impl<'a> Builder<'a> {
    fn new(d: &'a PolygonalDomain, anchors: Vec<Anchor>) -> Self {
        let reach = 2.0 * d.scale();
        let graph = d.visibility_graph();
        let shadows = anchors
            .iter()
            .map(|a| {
                let visible: Vec<Point> = match a.id {
                    AnchorId::Vertex(v) => graph.neighbors(v).iter().map(|&(j, _)| d.vertices()[j]).collect(),
                    AnchorId::Source => {
                        d.vertices().iter().copied().filter(|&r| r.dist(a.position) > d.tolerances().merge && d.segment_clear(a.position, r)).collect()
                    }
                };
                visible
                    .into_iter()
                    .filter(|r| r.dist(a.position) > d.tolerances().merge)
                    .map(|r| Segment::new(r, r + (r - a.position).normalized() * reach))
                    .collect()
            })
            .collect();
        Self { d, anchors, shadows, edges: d.edges().collect(), stats: SpmStats::default() }
    }

    fn params_on_segments<'s>(&self, curve: &BisectorCurve, segs: impl Iterator<Item = &'s Segment>, out: &mut Vec<f64>) {
        let eps = self.d.tolerances().eval;
        for seg in segs {
            for t in line_tie_params(curve, seg.a, seg.b - seg.a, 0.0, 1.0, eps) {
                out.push(curve.param_of(seg.at(t)));
            }
        }
    }

    /// Arcs on the bisector of anchors `i < j`.
    fn arcs_for_pair(&mut self, i: usize, j: usize) -> Vec<BisectorArc> {
        let d = self.d;
        let tol = *d.tolerances();
        let (ai, aj) = (self.anchors[i], self.anchors[j]);
        let Ok(curve) = make_bisector_with_tolerance(ai.site(), aj.site(), tol.tie) else {
            return Vec::new();
        };
        if !matches!(curve.kind, BisectorKind::Line | BisectorKind::HyperbolaBranch) {
            return Vec::new();
        }
        let (lo_box, hi_box) = d.bbox();
        let center = lo_box.lerp(hi_box, 0.5);
        let (lo, hi) = curve.param_range_within(center, 0.5 * tol.scale + tol.eval);

        let mut cuts = vec![lo, hi];
        self.params_on_segments(&curve, self.edges.iter(), &mut cuts);
        self.params_on_segments(&curve, self.shadows[i].iter(), &mut cuts);
        self.params_on_segments(&curve, self.shadows[j].iter(), &mut cuts);
        cuts.retain(|s| *s >= lo && *s <= hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= tol.eval * 1e-3);

        // Pieces inside the domain on which both anchors are visible.
        let mut viable: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            if s1 - s0 <= tol.eval * 1e-3 {
                continue;
            }
            let x = curve.point_at(0.5 * (s0 + s1));
            if d.contains(x) && d.segment_clear(ai.position, x) && d.segment_clear(aj.position, x) {
                match viable.last_mut() {
                    Some(last) if last.1 == s0 => last.1 = s1,
                    _ => viable.push((s0, s1)),
                }
            }
        }

        let lipschitz = 2.0 * curve.speed_bound();
        let mut arcs = Vec::new();
        for (lo, hi) in viable {
            let (bmin, bmax) = curve.param_bbox(lo, hi);
            let tie_max = ai.value_at(curve.point_at(lo)).max(ai.value_at(curve.point_at(hi)));
            let mut sub = vec![lo, hi];
            for (k, c) in self.anchors.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                // Skip anchors that cannot reach the tie value on this piece.
                let gap = Point::new(
                    (bmin.x - c.position.x).max(c.position.x - bmax.x).max(0.0),
                    (bmin.y - c.position.y).max(c.position.y - bmax.y).max(0.0),
                );
                if c.weight + gap.norm() > tie_max + tol.tie {
                    continue;
                }
                let roots: Vec<f64> = match weighted_circumcenters(ai.site(), aj.site(), c.site(), tol.tie) {
                    Some(pts) => pts.into_iter().map(|x| curve.param_of(x)).filter(|s| *s > lo && *s < hi).collect(),
                    None => {
                        let g = |s: f64| {
                            let x = curve.point_at(s);
                            c.value_at(x) - ai.value_at(x)
                        };
                        isolate_roots(&g, lo, hi, lipschitz, 8, tol.eval * 1e-3, tol.tie)
                    }
                };
                if roots.len() > 4 {
                    self.stats.excess_roots += 1;
                }
                sub.extend(roots);
            }
            sub.sort_by(f64::total_cmp);
            sub.dedup_by(|a, b| (*a - *b).abs() <= tol.eval * 1e-3);

            let mut good: Vec<(f64, f64)> = Vec::new();
            for w in sub.windows(2) {
                let (s0, s1) = (w[0], w[1]);
                if s1 - s0 <= tol.eval * 1e-3 {
                    continue;
                }
                let x = curve.point_at(0.5 * (s0 + s1));
                let t = ai.value_at(x);
                let undercut = self.anchors.iter().enumerate().any(|(k, c)| {
                    k != i && k != j && c.value_at(x) < t - tol.tie && d.segment_clear(c.position, x)
                });
                if !undercut {
                    match good.last_mut() {
                        Some(last) if last.1 == s0 => last.1 = s1,
                        _ => good.push((s0, s1)),
                    }
                }
            }
            for (s0, s1) in good {
                let (start, end) = (curve.point_at(s0), curve.point_at(s1));
                if start.dist(end) <= tol.merge {
                    continue;
                }
                arcs.push(BisectorArc { anchors: [ai.id, aj.id], curve, params: (s0, s1), start, end });
            }
        }
        arcs
    }

    /// Anchors tied at `x` and the number of distinct directions they lie in.
    fn ties_at(&self, x: Point) -> (Vec<AnchorId>, usize) {
        let tol = self.d.tolerances();
        let visible: Vec<(f64, &Anchor)> = self
            .anchors
            .iter()
            .filter(|a| self.d.segment_clear(a.position, x))
            .map(|a| (a.value_at(x), a))
            .collect();
        let Some(best) = visible.iter().map(|v| v.0).min_by(f64::total_cmp) else {
            return (Vec::new(), 0);
        };
        let mut tied: Vec<&Anchor> = visible.iter().filter(|v| v.0 <= best + tol.tie).map(|v| v.1).collect();
        tied.sort_by_key(|a| a.id);
        let mut dirs: Vec<Point> = Vec::new();
        for a in &tied {
            let v = a.position - x;
            let len = v.norm();
            if len <= tol.merge {
                // The point is the anchor itself; it is its own direction.
                dirs.push(Point::new(f64::NAN, f64::NAN));
                continue;
            }
            let u = v * (1.0 / len);
            if !dirs.iter().any(|w| w.is_finite() && w.dist(u) <= 1e-9) {
                dirs.push(u);
            }
        }
        (tied.into_iter().map(|a| a.id).collect(), dirs.len())
    }

    fn classify(&mut self, x: Point, source_vertex: Option<VertexId>) -> Option<SpmVertex> {
        let d = self.d;
        if let Some(v) = d.vertex_at(x) {
            let (anchors, _) = self.ties_at(d.vertex(v));
            return Some(SpmVertex { location: d.vertex(v), kind: SpmVertexKind::DomainVertex, anchors, source_vertex });
        }
        let (anchors, dirs) = self.ties_at(x);
        let kind = if d.on_boundary(x) && dirs >= 2 {
            SpmVertexKind::BoundaryFoot
        } else if dirs >= 3 {
            if dirs >= 4 {
                self.stats.multi_ties += 1;
            }
            SpmVertexKind::TriplePoint
        } else {
            return None;
        };
        Some(SpmVertex { location: x, kind, anchors, source_vertex })
    }
}

/// Builds the shortest path map from `s`.
pub fn build_spm(d: &PolygonalDomain, s: Point) -> Result<ShortestPathMap, SpmError> {
    if !d.contains(s) {
        return Err(SpmError::SourceOutside(s));
    }
    let field = single_source_distances(d, s)?;
    let source_vertex = d.vertex_at(s);
    let mut anchors = vec![Anchor { id: AnchorId::Source, position: s, weight: 0.0 }];
    for v in d.reflex_vertices() {
        if Some(v) == source_vertex {
            continue;
        }
        anchors.push(Anchor { id: AnchorId::Vertex(v), position: d.vertex(v), weight: field.distance(v) });
    }

    let mut b = Builder::new(d, anchors);
    let mut arcs = Vec::new();
    let m = b.anchors.len();
    for i in 0..m {
        for j in (i + 1)..m {
            arcs.extend(b.arcs_for_pair(i, j));
        }
    }

    let merge = d.tolerances().merge;
    let mut found: Vec<SpmVertex> = Vec::new();
    for arc in &arcs {
        for x in [arc.start, arc.end] {
            if found.iter().any(|v| v.location.dist(x) <= merge) {
                continue;
            }
            if let Some(v) = b.classify(x, source_vertex) {
                if !found.iter().any(|w| w.location.dist(v.location) <= merge) {
                    found.push(v);
                }
            }
        }
    }
    let mut vertices: Vec<SpmVertex> = Vec::with_capacity(d.n() + found.len());
    for v in d.vertex_ids() {
        let p = d.vertex(v);
        match found.iter().position(|w| w.kind == SpmVertexKind::DomainVertex && w.location == p) {
            Some(k) => vertices.push(found.swap_remove(k)),
            None => {
                let (anchors, _) = b.ties_at(p);
                vertices.push(SpmVertex { location: p, kind: SpmVertexKind::DomainVertex, anchors, source_vertex });
            }
        }
    }
    found.retain(|v| v.kind != SpmVertexKind::DomainVertex);
    found.sort_by(|a, b| a.kind.cmp(&b.kind).then(a.location.lex_cmp(&b.location)));
    vertices.extend(found);

    Ok(ShortestPathMap { source: s, source_vertex, anchors: b.anchors, arcs, vertices, stats: b.stats })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarthestPoint {
    pub point: Point,
    pub distance: f64,
}

/// Farthest point of the domain from the source of an already built map.
///
/// The distance function restricted to a cell is convex and its maximum over
/// an arc is attained at an arc end, so the maximum over the domain is found
/// among the domain vertices and the map vertices.
pub fn farthest_point_in(d: &PolygonalDomain, map: &ShortestPathMap) -> Result<FarthestPoint, SpmError> {
    let tol = d.tolerances();
    let mut best: Option<(f64, Point)> = None;
    for v in &map.vertices {
        let (dist, _) = map.eval(d, v.location);
        if best.map_or(true, |(bd, _)| dist > bd + tol.tie) {
            best = Some((dist, v.location));
        }
    }
    let (map_dist, point) = best.unwrap_or((0.0, map.source));
    let path = geodesic_distance(d, map.source, point);
    if (path.length - map_dist).abs() > tol.eval.max(1e-12 * map_dist) * 10.0 {
        return Err(SpmError::Inconsistent { point, map: map_dist, geodesic: path.length });
    }
    Ok(FarthestPoint { point, distance: path.length })
}

/// Farthest point of the domain from `p`.
pub fn farthest_point(d: &PolygonalDomain, p: Point) -> Result<FarthestPoint, SpmError> {
    let map = build_spm(d, p)?;
    farthest_point_in(d, &map)
}

#[derive(Serialize)]
struct ArcJson {
    anchors: [AnchorId; 2],
    kind: BisectorKind,
    start: Point,
    end: Point,
    polyline: Vec<Point>,
}

#[derive(Serialize)]
struct SpmJson<'a> {
    source: Point,
    source_vertex: Option<VertexId>,
    anchors: &'a [Anchor],
    arcs: Vec<ArcJson>,
    vertices: &'a [SpmVertex],
}

impl ShortestPathMap {
    /// JSON view used by the command line: anchors, arcs with 64-piece
    /// polylines, and map vertices.
    pub fn to_json_value(&self) -> serde_json::Value {
        let arcs = self
            .arcs
            .iter()
            .map(|a| ArcJson {
                anchors: a.anchors,
                kind: a.curve.kind,
                start: a.start,
                end: a.end,
                polyline: a.polyline(64),
            })
            .collect();
        serde_json::to_value(SpmJson {
            source: self.source,
            source_vertex: self.source_vertex,
            anchors: &self.anchors,
            arcs,
            vertices: &self.vertices,
        })
        .expect("map JSON is always serializable")
    }
}
