//! End-to-end acceptance checks. Each test prints one line with the
//! measured quantities and fails when its threshold is not met.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use geodiam::candidates::{bisector_adjacency, plausible_tuples, plausible_tuples_brute};
use geodiam::diameter::vertex_maps;
use geodiam::oracle::{local_improvement, random_convex_domain, random_domain, sample_diameter, DomainSpec};
use geodiam::spm::SpmVertexKind;
use geodiam::{build_spm, compute_diameter, diameter_vertex_only, geodesic_distance, spm_eval, Provenance};

fn report(name: &str, ok: bool, detail: String) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

#[test]
fn simple_polygons_match_vertex_pairs() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for seed in 0..50u64 {
        let n_outer = 5 + (seed as usize * 7) % 26;
        let d = random_domain(&DomainSpec::new(seed, n_outer, 0)).unwrap();
        assert!(d.n() <= 30);
        let (r, _) = compute_diameter(&d).unwrap();
        let want = max_vertex_pair_geodesic(&d);
        worst = worst.max((r.distance - want).abs() / want);
        count += 1;
    }
    let elapsed = start.elapsed();
    report(
        "simple-polygon equivalence",
        worst <= 1e-9 && elapsed <= Duration::from_secs(60),
        format!("{count} domains, worst relative error {worst:.3e}, {:.1}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn convex_polygons_match_euclidean_vertex_pairs() {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let n = 3 + (seed as usize * 11) % 48;
        let d = random_convex_domain(seed, n).unwrap();
        let (r, _) = compute_diameter(&d).unwrap();
        let vs = d.vertices();
        let want = vs.iter().flat_map(|a| vs.iter().map(move |b| a.dist(*b))).fold(0.0, f64::max);
        worst = worst.max((r.distance - want).abs() / want);
    }
    report("convex equivalence", worst <= 1e-12, format!("20 polygons, worst relative error {worst:.3e}"));
}

#[test]
fn diameter_dominates_the_sampling_oracle() {
    let start = Instant::now();
    let (mut worst_sample, mut worst_climb) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for seed in 0..25u64 {
        let spec = DomainSpec::new(500 + seed, 6 + (seed as usize) % 15, (seed % 3) as usize);
        let d = random_domain(&spec).unwrap();
        assert!(d.n() <= 30);
        let scale = d.scale();
        let (r, _) = compute_diameter(&d).unwrap();
        let o = sample_diameter(&d, scale / 50.0).unwrap();
        let c = local_improvement(&d, o.p, o.q);
        // Positive values are violations, in units of the scale.
        worst_sample = worst_sample.max((o.distance - r.distance) / scale);
        worst_climb = worst_climb.max((c.distance - r.distance) / scale);
    }
    let elapsed = start.elapsed();
    report(
        "oracle dominance",
        worst_sample <= 1e-9 && worst_climb <= 1e-6 && elapsed <= Duration::from_secs(600),
        format!(
            "25 domains, max (sample - diameter)/scale {worst_sample:.3e}, max (climbed - diameter)/scale {worst_climb:.3e}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn non_vertex_endpoint_demonstration() {
    let entry = index_entry("nonvertex_demo.json");
    let d = fixture("nonvertex_demo.json");
    let spec: DomainSpec = serde_json::from_value(entry["spec"].clone()).unwrap();
    assert_eq!(random_domain(&spec).unwrap().serialize_canonical(), d.serialize_canonical());
    let margin = entry["margin"].as_f64().unwrap();
    let scale = d.scale();

    let v = diameter_vertex_only(&d).unwrap();
    let o = sample_diameter(&d, scale / 50.0).unwrap();
    let climbed = local_improvement(&d, o.p, o.q);
    let (r, _) = compute_diameter(&d).unwrap();
    let class = r.p_provenance.class_name();
    let ok = climbed.distance - v.distance > 1e-3 * scale
        && !matches!(r.p_provenance, Provenance::DomainVertex { .. })
        && r.distance - v.distance >= margin;
    report(
        "non-vertex endpoint",
        ok,
        format!(
            "climb beats vertex-only by {:.3e}*scale, diameter beats it by {:.3e} (recorded margin {margin:.3e}), winner {class}",
            (climbed.distance - v.distance) / scale,
            r.distance - v.distance
        ),
    );
}

#[test]
fn plausible_tuples_match_brute_force() {
    let mut checked = 0;
    let mut total = 0;
    let mut mismatched = Vec::new();
    for path in corpus() {
        let d = load(&path);
        if d.n() > 40 {
            continue;
        }
        let maps = vertex_maps(&d).unwrap();
        let b = bisector_adjacency(&d, &maps);
        let fast = plausible_tuples(&b);
        let mut brute = plausible_tuples_brute(&b);
        brute.sort();
        if fast != brute {
            mismatched.push(name(&path));
        }
        total += fast.len();
        checked += 1;
    }
    report(
        "plausible-tuple oracle equivalence",
        mismatched.is_empty() && checked > 0,
        format!("{checked} fixtures, {total} tuples, mismatches {mismatched:?}"),
    );
}

#[test]
fn complexity_trends() {
    let sizes = [10usize, 15, 20, 25, 30, 40];
    let seeds = 12u64;
    let (mut ns, mut per_map, mut triples, mut tuples) = (vec![], vec![], vec![], vec![]);
    for &n in &sizes {
        let holes = n / 10;
        let (mut sn, mut sc, mut st, mut su) = (0.0, 0.0, 0.0, 0.0);
        for seed in 0..seeds {
            let d = random_domain(&DomainSpec::new(3000 + seed, n - 4 * holes, holes)).unwrap();
            let maps = vertex_maps(&d).unwrap();
            sn += d.n() as f64;
            sc += maps.iter().map(|m| m.complexity() as f64).sum::<f64>() / maps.len() as f64;
            st += maps.iter().map(|m| m.vertices_of_kind(SpmVertexKind::TriplePoint).count() as f64).sum::<f64>();
            su += plausible_tuples(&bisector_adjacency(&d, &maps)).len() as f64;
        }
        let k = seeds as f64;
        ns.push(sn / k);
        per_map.push(sc / k);
        triples.push(st / k);
        tuples.push(su / k);
    }
    let (a, b, c) = (loglog_slope(&ns, &per_map), loglog_slope(&ns, &triples), loglog_slope(&ns, &tuples));
    report(
        "complexity trends",
        a <= 1.3 && b <= 2.3 && c <= 3.3,
        format!("slopes: per-map arcs+vertices {a:.3}, triple points {b:.3}, plausible tuples {c:.3}"),
    );
}

#[test]
fn shortest_path_maps_agree_with_geodesics() {
    let mut worst: f64 = 0.0;
    let mut evaluations = 0;
    for (i, path) in corpus().iter().enumerate() {
        let d = load(path);
        let tol = 1e-9 * d.scale();
        let mut sampler = Sampler::new(i as u64);
        let points: Vec<_> = (0..1000).map(|_| sampler.point_in(&d)).collect();
        for v in d.vertex_ids() {
            let s = d.vertex(v);
            let map = build_spm(&d, s).unwrap();
            for &x in &points {
                let err = (spm_eval(&d, &map, x).0 - geodesic_distance(&d, s, x).length).abs();
                worst = worst.max(err / tol);
                evaluations += 1;
            }
        }
    }
    report(
        "map consistency",
        worst <= 1.0,
        format!("{evaluations} evaluations, worst error {worst:.3e} x 1e-9*scale"),
    );
}

#[test]
fn diameter_pairs_are_local_maxima() {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_name = String::new();
    for path in corpus() {
        let d = load(&path);
        let scale = d.scale();
        let (r, _) = compute_diameter(&d).unwrap();
        let gain = best_perturbation_gain(&d, r.p, r.q, 1e-4 * scale) / scale;
        if gain > worst {
            worst = gain;
            worst_name = name(&path);
        }
    }
    report(
        "local maximality",
        worst <= 1e-6,
        format!("largest perturbation gain {worst:.3e}*scale ({worst_name})"),
    );
}

#[test]
fn diameter_output_is_thread_independent() {
    let exe = env!("CARGO_BIN_EXE_geodiam");
    let run = |threads: &str, path: &std::path::Path| {
        let out = Command::new(exe).args(["--threads", threads, "diameter"]).arg(path).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let mut differing = Vec::new();
    let files = corpus();
    for path in &files {
        if run("1", path) != run("8", path) {
            differing.push(name(path));
        }
    }
    report(
        "determinism",
        differing.is_empty(),
        format!("{} files, differing outputs {differing:?}", files.len()),
    );
}
