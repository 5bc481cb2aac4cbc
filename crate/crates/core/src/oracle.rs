//! Independent ground truth for testing: a sampling lower bound on the
//! diameter, a hill climber for endpoint pairs, and a seeded generator of
//! random domains.
//!
//! The generator draws from `rand_xorshift::XorShiftRng` (Marsaglia's
//! xorshift128 on four 32-bit words) seeded with `seed_from_u64`, and turns
//! each `next_u64()` into a double as `(x >> 11) * 2^-53`. Those two choices
//! fix every generated coordinate.

use std::path::Path;

use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::PolygonalDomain;
use crate::geom::Point;
use crate::visgraph::{single_source_distances, vertex_distance_matrix};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("resolution {resolution} yields only {samples} samples (at least 16 needed)")]
    ResolutionTooCoarse { resolution: f64, samples: usize },
    #[error("no valid domain after {0} placement attempts")]
    GenerationFailed(usize),
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub resolution: f64,
}

/// Domain vertices, boundary points every `resolution` along each edge, and
/// interior grid points at spacing `resolution`.
pub fn sample_set(d: &PolygonalDomain, resolution: f64) -> Result<SampleSet, OracleError> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(OracleError::InvalidResolution(resolution));
    }
    let mut points: Vec<Point> = d.vertices().to_vec();
    for e in d.edges() {
        let k = (e.length() / resolution).floor() as usize;
        for i in 1..=k {
            let t = i as f64 * resolution / e.length();
            if t < 1.0 - 1e-9 {
                points.push(e.at(t));
            }
        }
    }
    let (lo, hi) = d.bbox();
    let nx = ((hi.x - lo.x) / resolution).floor() as usize;
    let ny = ((hi.y - lo.y) / resolution).floor() as usize;
    for i in 0..=nx {
        for j in 0..=ny {
            let p = Point::new(lo.x + i as f64 * resolution, lo.y + j as f64 * resolution);
            if d.contains(p) && !d.on_boundary(p) {
                points.push(p);
            }
        }
    }
    if points.len() < 16 {
        return Err(OracleError::ResolutionTooCoarse { resolution, samples: points.len() });
    }
    Ok(SampleSet { points, resolution })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OraclePair {
    pub p: Point,
    pub q: Point,
    pub distance: f64,
}

/// Largest geodesic distance over all pairs of samples; a lower bound on the
/// diameter.
pub fn sample_diameter(d: &PolygonalDomain, resolution: f64) -> Result<OraclePair, OracleError> {
    let samples = sample_set(d, resolution)?.points;
    let n = d.n();
    let vd = vertex_distance_matrix(d);
    let verts = d.vertices();
    let visible: Vec<Vec<usize>> = samples
        .par_iter()
        .map(|&p| (0..n).filter(|&v| d.segment_clear(p, verts[v])).collect())
        .collect();
    let best_per_source: Vec<OraclePair> = (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let p = samples[i];
            let to_vertex: Vec<f64> = (0..n)
                .map(|v| visible[i].iter().map(|&u| p.dist(verts[u]) + vd[u][v]).fold(f64::INFINITY, f64::min))
                .collect();
            let mut best = OraclePair { p, q: p, distance: 0.0 };
            for (j, &q) in samples.iter().enumerate().skip(i + 1) {
                let direct = p.dist(q);
                let clear = d.segment_clear(p, q);
                if clear && direct <= best.distance {
                    continue;
                }
                let dist = if clear {
                    direct
                } else {
                    visible[j].iter().map(|&v| to_vertex[v] + verts[v].dist(q)).fold(f64::INFINITY, f64::min)
                };
                if dist > best.distance {
                    best = OraclePair { p, q, distance: dist };
                }
            }
            best
        })
        .collect();
    Ok(best_per_source
        .into_iter()
        .fold(OraclePair { p: samples[0], q: samples[0], distance: 0.0 }, |acc, b| {
            if b.distance > acc.distance {
                b
            } else {
                acc
            }
        }))
}

/// `from + step * dir`, or the first boundary point along the way when the
/// step leaves the domain.
pub fn clip_step(d: &PolygonalDomain, from: Point, dir: Point, step: f64) -> Point {
    clip_fraction(d, from, dir, step).0
}

fn clip_fraction(d: &PolygonalDomain, from: Point, dir: Point, step: f64) -> (Point, f64) {
    let target = from + dir * step;
    if d.segment_visible(from, target) {
        return (target, 1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if d.segment_visible(from, from + dir * (step * mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (snap_to_boundary(d, from + dir * (step * lo)), lo)
}

/// Moves `from` by `step` along `dir`. A step that leaves the domain yields
/// the first boundary contact along the step and, when reachable in a
/// straight line, the boundary point nearest to the target, which lets the
/// climb slide along edges.
fn project_step(d: &PolygonalDomain, from: Point, dir: Point, step: f64) -> Vec<Point> {
    let (contact, frac) = clip_fraction(d, from, dir, step);
    if frac == 1.0 {
        return vec![contact];
    }
    let mut out = Vec::with_capacity(2);
    // Contacts only a sliver away are no-ops that would let the climb crawl.
    if frac > 1e-3 {
        out.push(contact);
    }
    let nearest = snap_to_boundary(d, from + dir * step);
    if nearest.dist(from) > 1e-3 * step && !out.contains(&nearest) && d.segment_visible(from, nearest) {
        out.push(nearest);
    }
    out
}

fn snap_to_boundary(d: &PolygonalDomain, x: Point) -> Point {
    if let Some(v) = d.vertex_at(x) {
        return d.vertex(v);
    }
    d.edges()
        .map(|e| e.at(e.closest_param(x)))
        .min_by(|a, b| a.dist2(x).total_cmp(&b.dist2(x)))
        .unwrap_or(x)
}

/// Upper limit on accepted moves per step size.
const MAX_MOVES: usize = 10_000;

/// Alternating eight-direction hill climb on both endpoints over step sizes
/// `scale * 10^-1 ... scale * 10^-7`.
pub fn local_improvement(d: &PolygonalDomain, p: Point, q: Point) -> OraclePair {
    let scale = d.scale();
    let dirs: Vec<Point> = (0..8)
        .map(|k| {
            let a = k as f64 * std::f64::consts::FRAC_PI_4;
            Point::new(a.cos(), a.sin())
        })
        .collect();
    let gain = 1e-13 * scale;
    let (mut p, mut q) = (p, q);
    let dist_from = |fixed: Point, x: Point| match single_source_distances(d, fixed) {
        Ok(f) => f.distance_to_point(d, x).0,
        Err(_) => 0.0,
    };
    let mut best = dist_from(p, q);
    for e in 1..=7 {
        let step = scale * 10f64.powi(-e);
        let mut moves = 0;
        loop {
            let mut improved = false;
            for moving_q in [false, true] {
                let (fixed, moving) = if moving_q { (p, q) } else { (q, p) };
                let Ok(field) = single_source_distances(d, fixed) else { continue };
                let mut cur = moving;
                while moves < MAX_MOVES {
                    let mut step_best: Option<(f64, Point)> = None;
                    for &dir in &dirs {
                        for cand in project_step(d, cur, dir, step) {
                            if cand == cur {
                                continue;
                            }
                            let v = field.distance_to_point(d, cand).0;
                            if v > best + gain && step_best.map_or(true, |(bv, _)| v > bv) {
                                step_best = Some((v, cand));
                            }
                        }
                    }
                    match step_best {
                        Some((v, c)) => {
                            best = v;
                            cur = c;
                            improved = true;
                            moves += 1;
                        }
                        None => break,
                    }
                }
                if moving_q {
                    q = cur;
                } else {
                    p = cur;
                }
            }
            if !improved || moves >= MAX_MOVES {
                break;
            }
        }
    }
    OraclePair { p, q, distance: best }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub seed: u64,
    pub n_outer: usize,
    pub n_holes: usize,
    /// Range of hole radii, in units of the outer radius (10).
    pub hole_size_range: (f64, f64),
}

impl DomainSpec {
    pub fn new(seed: u64, n_outer: usize, n_holes: usize) -> Self {
        Self { seed, n_outer, n_holes, hole_size_range: (0.8, 2.2) }
    }

    pub fn file_name(&self) -> String {
        format!("seed{}_n{}_h{}.json", self.seed, self.n_outer, self.n_holes)
    }
}

struct Unit(XorShiftRng);

impl Unit {
    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

const OUTER_RADIUS: f64 = 10.0;
const MAX_ATTEMPTS: usize = 1000;

fn ring_gap(a: &[Point], b: &[Point]) -> f64 {
    use crate::geom::Segment;
    let seg = |r: &[Point], i: usize| Segment::new(r[i], r[(i + 1) % r.len()]);
    let mut gap = f64::INFINITY;
    for i in 0..a.len() {
        for p in b {
            gap = gap.min(seg(a, i).distance_to(*p));
        }
    }
    for i in 0..b.len() {
        for p in a {
            gap = gap.min(seg(b, i).distance_to(*p));
        }
    }
    gap
}

/// Random domain: a star-shaped outer ring around the origin with convex
/// holes placed by rejection sampling. Deterministic in `spec.seed`.
pub fn random_domain(spec: &DomainSpec) -> Result<PolygonalDomain, OracleError> {
    if spec.n_outer < 3 {
        return Err(OracleError::InvalidSpec(format!("n_outer = {} < 3", spec.n_outer)));
    }
    let (hmin, hmax) = spec.hole_size_range;
    if !(hmin > 0.0 && hmax >= hmin) {
        return Err(OracleError::InvalidSpec(format!("hole_size_range = {:?}", spec.hole_size_range)));
    }
    let mut rng = Unit(XorShiftRng::seed_from_u64(spec.seed));
    let n = spec.n_outer;
    let tau = std::f64::consts::TAU;
    let outer: Vec<Point> = (0..n)
        .map(|i| {
            let a = tau * (i as f64 + rng.range(0.15, 0.85)) / n as f64;
            let r = OUTER_RADIUS * rng.range(0.45, 1.0);
            Point::new(r * a.cos(), r * a.sin())
        })
        .collect();
    let margin = 0.03 * OUTER_RADIUS;
    let mut holes: Vec<Vec<Point>> = Vec::new();
    let mut attempts = 0;
    while holes.len() < spec.n_holes {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(OracleError::GenerationFailed(MAX_ATTEMPTS));
        }
        let c = Point::new(rng.range(-OUTER_RADIUS, OUTER_RADIUS), rng.range(-OUTER_RADIUS, OUTER_RADIUS));
        let size = rng.range(hmin, hmax);
        let k = 3 + (rng.next() * 3.0) as usize;
        let mut hole: Vec<Point> = (0..k)
            .map(|i| {
                let a = tau * (i as f64 + rng.range(0.2, 0.8)) / k as f64;
                let r = size * rng.range(0.6, 1.0);
                Point::new(c.x + r * a.cos(), c.y + r * a.sin())
            })
            .collect();
        hole.reverse();
        if ring_gap(&outer, &hole) < margin || holes.iter().any(|h| ring_gap(h, &hole) < margin) {
            continue;
        }
        let mut trial = holes.clone();
        trial.push(hole.clone());
        if PolygonalDomain::new(outer.clone(), trial).is_ok() {
            holes.push(hole);
        }
    }
    PolygonalDomain::new(outer, holes).map_err(|_| OracleError::GenerationFailed(attempts))
}

/// Random convex polygon with `n` vertices on an ellipse with random axes
/// and rotation. Deterministic in `seed`.
pub fn random_convex_domain(seed: u64, n: usize) -> Result<PolygonalDomain, OracleError> {
    if n < 3 {
        return Err(OracleError::InvalidSpec(format!("n = {n} < 3")));
    }
    let mut rng = Unit(XorShiftRng::seed_from_u64(seed));
    let (a, b) = (OUTER_RADIUS * rng.range(0.5, 1.0), OUTER_RADIUS * rng.range(0.2, 1.0));
    let rot = rng.range(0.0, std::f64::consts::PI);
    let (c, s) = (rot.cos(), rot.sin());
    let tau = std::f64::consts::TAU;
    let outer: Vec<Point> = (0..n)
        .map(|i| {
            let t = tau * (i as f64 + rng.range(0.1, 0.9)) / n as f64;
            let (x, y) = (a * t.cos(), b * t.sin());
            Point::new(c * x - s * y, s * x + c * y)
        })
        .collect();
    PolygonalDomain::new(outer, Vec::new()).map_err(|_| OracleError::GenerationFailed(1))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub file: String,
    pub spec: DomainSpec,
}

/// Writes one JSON file per spec plus an `index.json` listing them.
pub fn write_corpus(dir: &Path, specs: &[DomainSpec]) -> Result<Vec<CorpusEntry>, OracleError> {
    std::fs::create_dir_all(dir)?;
    let mut index = Vec::with_capacity(specs.len());
    for spec in specs {
        let d = random_domain(spec)?;
        let file = spec.file_name();
        std::fs::write(dir.join(&file), d.serialize_canonical())?;
        index.push(CorpusEntry { file, spec: spec.clone() });
    }
    let text = serde_json::to_string_pretty(&index).expect("index JSON is always serializable");
    std::fs::write(dir.join("index.json"), text)?;
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn generator_is_deterministic_and_valid() {
        let spec = DomainSpec::new(1, 8, 0);
        let a = random_domain(&spec).unwrap();
        let b = random_domain(&spec).unwrap();
        assert_eq!(a.n(), 8);
        assert_eq!(a.serialize_canonical(), b.serialize_canonical());
        let d = random_domain(&DomainSpec::new(7, 12, 2)).unwrap();
        assert_eq!(d.holes().len(), 2);
        for v in d.vertex_ids().filter(|&v| d.ring_of(v) > 0) {
            assert!(d.is_reflex(v));
        }
    }

    #[test]
    fn square_samples_include_the_diagonal() {
        let d = fixtures::unit_square();
        let pair = sample_diameter(&d, 0.25).unwrap();
        assert!((pair.distance - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(sample_diameter(&d, 0.0), Err(OracleError::InvalidResolution(_))));
        assert!(matches!(sample_diameter(&d, 10.0), Err(OracleError::ResolutionTooCoarse { .. })));
    }

    #[test]
    fn hill_climb_examples() {
        let d = fixtures::unit_square();
        let r = local_improvement(&d, Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        assert_eq!((r.p, r.q), (Point::new(0.0, 0.0), Point::new(1.0, 1.0)));
        let r = local_improvement(&d, Point::new(0.01, 0.01), Point::new(0.99, 0.99));
        assert!(r.p.dist(Point::new(0.0, 0.0)) < 1e-6, "{:?}", r.p);
        assert!(r.q.dist(Point::new(1.0, 1.0)) < 1e-6, "{:?}", r.q);
    }
}
