mod common;

use common::*;
use geodiam::geom::{make_bisector, Point, WeightedSite};
use geodiam::{geodesic_distance, PolygonalDomain};
use proptest::prelude::*;

/// Crossing-number test against the raw rings, boundary excluded.
fn crossing_inside(d: &PolygonalDomain, p: Point) -> bool {
    let inside_ring = |ring: &[Point]| {
        let mut c = false;
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x) {
                c = !c;
            }
        }
        c
    };
    inside_ring(d.outer()) && !d.holes().iter().any(|h| inside_ring(h))
}

fn two_holes() -> PolygonalDomain {
    fixture("two_holes.json")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bisector_is_symmetric(
        ax in -10.0..10.0f64, ay in -10.0..10.0f64, bx in -10.0..10.0f64, by in -10.0..10.0f64,
        wa in 0.0..3.0f64, wb in 0.0..3.0f64,
    ) {
        let a = WeightedSite::new(Point::new(ax, ay), wa);
        let b = WeightedSite::new(Point::new(bx, by), wb);
        prop_assume!(a.site.dist(b.site) > 1e-3);
        let (ab, ba) = (make_bisector(a, b), make_bisector(b, a));
        prop_assert_eq!(ab.is_ok(), ba.is_ok());
        if let (Ok(ab), Ok(ba)) = (ab, ba) {
            prop_assert!(ab.same_locus(&ba));
        }
    }

    #[test]
    fn containment_matches_crossing_number(x in -0.5..10.5f64, y in -0.5..6.5f64) {
        let d = two_holes();
        let p = Point::new(x, y);
        prop_assume!(d.distance_to_boundary(p) > 1e-6);
        prop_assert_eq!(d.contains(p), crossing_inside(&d, p));
    }

    #[test]
    fn visibility_is_symmetric(s1 in 0u64..1000, s2 in 0u64..1000) {
        let d = two_holes();
        let (p, q) = (Sampler::new(s1).point_in(&d), Sampler::new(s2 + 1000).point_in(&d));
        prop_assert_eq!(d.segment_visible(p, q), d.segment_visible(q, p));
    }

    #[test]
    fn geodesic_is_a_metric(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000) {
        let d = two_holes();
        let eps = d.tolerances().eval;
        let p = Sampler::new(s1).point_in(&d);
        let q = Sampler::new(s2 + 1000).point_in(&d);
        let r = Sampler::new(s3 + 2000).point_in(&d);
        let pq = geodesic_distance(&d, p, q).length;
        prop_assert!((pq - geodesic_distance(&d, q, p).length).abs() <= eps);
        prop_assert!(pq >= p.dist(q) - eps);
        let pr = geodesic_distance(&d, p, r).length;
        let rq = geodesic_distance(&d, r, q).length;
        prop_assert!(pq <= pr + rq + eps);
    }
}
