//! Scale-relative tolerances shared by every module.

use serde::Serialize;

/// All tolerances are multiples of `scale`, the diagonal of the domain's
/// bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub scale: f64,
    /// Two weighted distances are tied when they differ by at most this.
    pub tie: f64,
    /// On-curve and on-boundary tests.
    pub eval: f64,
    /// Points closer than this are the same point.
    pub merge: f64,
}

impl Tolerances {
    pub fn for_scale(scale: f64) -> Self {
        Self { scale, tie: 1e-9 * scale, eval: 1e-9 * scale, merge: 1e-7 * scale }
    }
}
