//! Geodesic diameter of polygonal domains with holes.
//!
//! The diameter is found by evaluating a finite set of candidate endpoints:
//! domain vertices, boundary feet and triple points of the shortest path maps
//! from every vertex, and the plausible crossings of bisectors from two
//! different maps. For each candidate the farthest point of the domain is
//! read off the candidate's own shortest path map.

pub mod candidates;
pub mod cli;
pub mod diameter;
pub mod domain;
pub mod fixtures;
pub mod geom;
pub mod oracle;
pub mod spm;
pub mod tolerance;
pub mod visgraph;

pub use candidates::{BisectorAdjacency, CandidatePoint, PlausibleTuple, Provenance};
pub use diameter::{compute_diameter, diameter_vertex_only, AlgorithmReport, DiameterOptions, DiameterResult};
pub use domain::{parse_domain, DomainError, PolygonalDomain, VertexId};
pub use geom::{orient, BisectorCurve, BisectorKind, Point, Segment, WeightedSite};
pub use spm::{build_spm, farthest_point, spm_eval, AnchorId, ShortestPathMap};
pub use tolerance::Tolerances;
pub use visgraph::{geodesic_distance, single_source_distances, GeodesicPath};
