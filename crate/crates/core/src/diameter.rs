//! The geodesic diameter: the largest farthest-point distance over all
//! candidate endpoints.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::candidates::{
    bisector_adjacency, boundary_foot_candidates, plausible_nodes, plausible_tuples, triple_point_candidates,
    vertex_candidates, CandidatePoint, PointSet, Provenance,
};
use crate::domain::PolygonalDomain;
use crate::geom::Point;
use crate::spm::{build_spm, farthest_point, farthest_point_in, FarthestPoint, ShortestPathMap, SpmError};
use crate::visgraph::{geodesic_distance, GeodesicPath};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiameterError {
    #[error(transparent)]
    Spm(#[from] SpmError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiameterOptions {
    /// Skip candidates whose eccentricity bound cannot beat the best vertex.
    pub prune: bool,
    /// Minimum number of runner-ups reported.
    pub top_k: usize,
}

impl Default for DiameterOptions {
    fn default() -> Self {
        Self { prune: false, top_k: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedCandidate {
    pub candidate: CandidatePoint,
    pub farthest: Point,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiameterResult {
    pub p: Point,
    pub q: Point,
    pub distance: f64,
    pub p_provenance: Provenance,
    pub witness: GeodesicPath,
    pub runner_ups: Vec<RankedCandidate>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CandidateCounts {
    pub domain_vertices: usize,
    pub boundary_feet: usize,
    pub triple_points: usize,
    pub plausible_tuples: usize,
    pub plausible_nodes: usize,
    /// Candidates left after merging coincident locations.
    pub merged: usize,
    pub evaluated: usize,
    pub pruned: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub maps_ms: f64,
    pub adjacency_ms: f64,
    pub tuples_ms: f64,
    pub nodes_ms: f64,
    pub farthest_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReportFlags {
    /// Candidates whose farthest distance ties the maximum.
    pub co_optimal: usize,
    pub excess_roots: usize,
    pub multi_ties: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AlgorithmReport {
    pub n: usize,
    pub counts: CandidateCounts,
    pub timings: PhaseTimings,
    pub flags: ReportFlags,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn vertex_maps(d: &PolygonalDomain) -> Result<Vec<ShortestPathMap>, SpmError> {
    d.vertex_ids().collect::<Vec<_>>().into_par_iter().map(|v| build_spm(d, d.vertex(v))).collect()
}

/// Ordered reduction: a later candidate replaces the best only when it is
/// farther by more than the tie tolerance.
fn assemble(
    d: &PolygonalDomain,
    ranked: Vec<RankedCandidate>,
    top_k: usize,
) -> (DiameterResult, usize) {
    let tie = d.tolerances().tie;
    let mut best = 0;
    for (i, r) in ranked.iter().enumerate() {
        if r.distance > ranked[best].distance + tie {
            best = i;
        }
    }
    let winner = ranked[best].clone();
    let near = 1e-9 * d.scale();
    let mut others: Vec<RankedCandidate> =
        ranked.iter().enumerate().filter(|&(i, _)| i != best).map(|(_, r)| r.clone()).collect();
    others.sort_by(|a, b| b.distance.total_cmp(&a.distance));
    let co_optimal = others.iter().take_while(|r| r.distance >= winner.distance - near).count();
    others.truncate(co_optimal.max(top_k));
    let witness = geodesic_distance(d, winner.candidate.location, winner.farthest);
    (
        DiameterResult {
            p: winner.candidate.location,
            q: winner.farthest,
            distance: winner.distance,
            p_provenance: winner.candidate.provenance,
            witness,
            runner_ups: others,
        },
        co_optimal,
    )
}

fn rank(c: CandidatePoint, f: FarthestPoint) -> RankedCandidate {
    RankedCandidate { candidate: c, farthest: f.point, distance: f.distance }
}

fn vertex_ranking(d: &PolygonalDomain, maps: &[ShortestPathMap]) -> Result<Vec<RankedCandidate>, SpmError> {
    vertex_candidates(d)
        .into_par_iter()
        .zip(maps.par_iter())
        .map(|(c, m)| farthest_point_in(d, m).map(|f| rank(c, f)))
        .collect()
}

/// Largest farthest-point distance over the domain vertices.
pub fn diameter_vertex_only(d: &PolygonalDomain) -> Result<DiameterResult, DiameterError> {
    let maps = vertex_maps(d)?;
    let ranked = vertex_ranking(d, &maps)?;
    Ok(assemble(d, ranked, DiameterOptions::default().top_k).0)
}

pub fn compute_diameter(d: &PolygonalDomain) -> Result<(DiameterResult, AlgorithmReport), DiameterError> {
    compute_diameter_with(d, &DiameterOptions::default())
}

pub fn compute_diameter_with(
    d: &PolygonalDomain,
    opts: &DiameterOptions,
) -> Result<(DiameterResult, AlgorithmReport), DiameterError> {
    let start = Instant::now();
    let mut report = AlgorithmReport { n: d.n(), ..Default::default() };

    let t = Instant::now();
    let maps = vertex_maps(d)?;
    report.timings.maps_ms = ms(t);
    for m in &maps {
        report.flags.excess_roots += m.stats.excess_roots;
        report.flags.multi_ties += m.stats.multi_ties;
    }

    let t = Instant::now();
    let b = bisector_adjacency(d, &maps);
    report.timings.adjacency_ms = ms(t);
    let t = Instant::now();
    let tuples = plausible_tuples(&b);
    report.timings.tuples_ms = ms(t);
    let t = Instant::now();
    let nodes = plausible_nodes(d, &maps, &tuples);
    report.timings.nodes_ms = ms(t);

    let feet = boundary_foot_candidates(&maps);
    let triples = triple_point_candidates(&maps);
    report.counts.domain_vertices = d.n();
    report.counts.boundary_feet = feet.len();
    report.counts.triple_points = triples.len();
    report.counts.plausible_tuples = tuples.len();
    report.counts.plausible_nodes = nodes.len();

    let t = Instant::now();
    let mut ranked = vertex_ranking(d, &maps)?;

    // Non-vertex candidates, one per location, lowest class first.
    let mut seen = PointSet::new(d.tolerances().merge);
    for v in d.vertices() {
        seen.insert(*v);
    }
    let mut rest: Vec<CandidatePoint> = Vec::new();
    for list in [feet, triples, nodes] {
        let mut list = list;
        list.sort_by(|a, b| a.location.lex_cmp(&b.location).then(a.provenance.cmp(&b.provenance)));
        rest.extend(list.into_iter().filter(|c| seen.insert(c.location)));
    }
    report.counts.merged = d.n() + rest.len();

    let vertex_best = ranked.iter().map(|r| r.distance).fold(0.0, f64::max);
    let eccentricity: Vec<f64> = ranked.iter().map(|r| r.distance).collect();
    let tie = d.tolerances().tie;
    let can_win = |x: Point| {
        let bound = d
            .vertices()
            .iter()
            .zip(&eccentricity)
            .filter(|(v, _)| d.segment_clear(x, **v))
            .map(|(v, e)| x.dist(*v) + e)
            .fold(f64::INFINITY, f64::min);
        bound > vertex_best + tie
    };
    let evaluated: Vec<Option<RankedCandidate>> = rest
        .par_iter()
        .map(|&c| {
            if opts.prune && !can_win(c.location) {
                return Ok(None);
            }
            farthest_point(d, c.location).map(|f| Some(rank(c, f)))
        })
        .collect::<Result<_, SpmError>>()?;
    report.counts.pruned = evaluated.iter().filter(|r| r.is_none()).count();
    ranked.extend(evaluated.into_iter().flatten());
    report.counts.evaluated = ranked.len();
    report.timings.farthest_ms = ms(t);

    let (result, co_optimal) = assemble(d, ranked, opts.top_k);
    report.flags.co_optimal = co_optimal;
    report.timings.total_ms = ms(start);
    Ok((result, report))
}
