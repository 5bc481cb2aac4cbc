//! Small named domains used by tests, examples and the command line.

use crate::domain::PolygonalDomain;
use crate::geom::Point;

fn ring(v: &[(f64, f64)]) -> Vec<Point> {
    v.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

fn build(outer: &[(f64, f64)], holes: &[&[(f64, f64)]]) -> PolygonalDomain {
    PolygonalDomain::new(ring(outer), holes.iter().map(|h| ring(h)).collect()).expect("fixture is valid")
}

pub fn unit_square() -> PolygonalDomain {
    build(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], &[])
}

pub fn convex_hexagon() -> PolygonalDomain {
    build(&[(1.0, 0.0), (0.5, 0.9), (-0.5, 0.9), (-1.0, 0.0), (-0.5, -0.9), (0.5, -0.9)], &[])
}

pub fn l_shape() -> PolygonalDomain {
    build(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)], &[])
}

/// `[0,4]^2` with a thin vertical rectangular hole `[1.9,2.1] x [0.5,3.5]`.
pub fn slit() -> PolygonalDomain {
    build(
        &[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)],
        &[&[(1.9, 0.5), (2.1, 0.5), (2.1, 3.5), (1.9, 3.5)]],
    )
}

/// `[0,4]^2` with a centered square hole `[1,3]^2`.
pub fn square_ring() -> PolygonalDomain {
    build(
        &[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)],
        &[&[(1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0)]],
    )
}

/// Rectangle with two triangular holes placed so that bisectors from
/// different maps cross in the interior.
pub fn two_holes() -> PolygonalDomain {
    build(
        &[(0.0, 0.0), (10.0, 0.0), (10.0, 6.0), (0.0, 6.0)],
        &[&[(2.5, 2.0), (3.5, 2.2), (3.0, 3.6)], &[(6.2, 2.6), (7.4, 3.1), (6.5, 4.0)]],
    )
}
