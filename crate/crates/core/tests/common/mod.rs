#![allow(dead_code)]

use std::path::{Path, PathBuf};

use geodiam::oracle::clip_step;
use geodiam::{parse_domain, Point, PolygonalDomain};
use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;
use serde_json::Value;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load(path: &Path) -> PolygonalDomain {
    parse_domain(&std::fs::read(path).unwrap()).unwrap()
}

pub fn fixture(name: &str) -> PolygonalDomain {
    load(&fixtures_dir().join(name))
}

/// Entry of `fixtures/index.json` for `file`.
pub fn index_entry(file: &str) -> Value {
    let text = std::fs::read_to_string(fixtures_dir().join("index.json")).unwrap();
    let index: Vec<Value> = serde_json::from_str(&text).unwrap();
    index.into_iter().find(|e| e["file"] == file).unwrap()
}

/// Every domain file of the corpus: the named fixtures and the generated
/// random ones.
pub fn corpus() -> Vec<PathBuf> {
    let mut out = Vec::new();
    for dir in [fixtures_dir(), fixtures_dir().join("random")] {
        let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().unwrap() != "index.json")
            .collect();
        files.sort();
        out.extend(files);
    }
    out
}

pub fn name(path: &Path) -> String {
    path.file_name().unwrap().to_string_lossy().into_owned()
}

pub struct Sampler(XorShiftRng);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self(XorShiftRng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform point of the domain by rejection from its bounding box.
    pub fn point_in(&mut self, d: &PolygonalDomain) -> Point {
        let (lo, hi) = d.bbox();
        loop {
            let p = Point::new(lo.x + (hi.x - lo.x) * self.unit(), lo.y + (hi.y - lo.y) * self.unit());
            if d.contains(p) {
                return p;
            }
        }
    }
}

pub fn compass(k: usize) -> Vec<Point> {
    (0..k)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / k as f64;
            Point::new(a.cos(), a.sin())
        })
        .collect()
}

/// Largest gain of `d(p', q')` over `d(p, q)` when either or both endpoints
/// move by `step` in one of 16 compass directions, clipped to the domain.
pub fn best_perturbation_gain(d: &PolygonalDomain, p: Point, q: Point, step: f64) -> f64 {
    let base = geodiam::geodesic_distance(d, p, q).length;
    let dirs = compass(16);
    let mut ps = vec![p];
    let mut qs = vec![q];
    for &u in &dirs {
        ps.push(clip_step(d, p, u, step));
        qs.push(clip_step(d, q, u, step));
    }
    let mut gain = f64::NEG_INFINITY;
    for &a in &ps {
        for &b in &qs {
            gain = gain.max(geodiam::geodesic_distance(d, a, b).length - base);
        }
    }
    gain
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

pub fn max_vertex_pair_geodesic(d: &PolygonalDomain) -> f64 {
    let vs = d.vertices();
    let mut best: f64 = 0.0;
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            best = best.max(geodiam::geodesic_distance(d, vs[i], vs[j]).length);
        }
    }
    best
}
