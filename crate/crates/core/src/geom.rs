//! Primitive geometry: points, segments, orientation, and the tie curves of
//! additively weighted point sites.
//!
//! A tie curve between two weighted sites `a`, `b` is the locus
//! `w_a + |x - a| = w_b + |x - b|`. Depending on the weight gap it is a line
//! (equal weights), one branch of a hyperbola, a ray (gap equal to `|ab|`),
//! or empty (gap larger than `|ab|`). Curves are never converted to implicit
//! conic form; they are evaluated through the tie function directly and
//! intersections are refined against it.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("sites coincide with equal weights; the tie locus is the whole plane")]
    DegenerateEverywhere,
    #[error("curves coincide on a one-dimensional set")]
    OverlappingCurves,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn dist2(self, o: Point) -> f64 {
        let d = self - o;
        d.dot(d)
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    #[inline]
    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic order on (x, y) using the IEEE total order.
    pub fn lex_cmp(&self, o: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

// Points travel as `[x, y]` pairs in every JSON surface.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(d)?;
        Ok(Point::new(x, y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Parameter of the closest point on the segment, clamped to `[0, 1]`.
    pub fn closest_param(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return 0.0;
        }
        ((p - self.a).dot(d) / len2).clamp(0.0, 1.0)
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        self.at(self.closest_param(p)).dist(p)
    }
}

/// Relative tolerance used by [`orient`] to call a triple collinear.
pub const EPS_COLLINEAR: f64 = 1e-12;

/// Sign of twice the signed area of `pqr`: `+1` counter-clockwise, `-1`
/// clockwise, `0` when collinear within [`EPS_COLLINEAR`] relative to the
/// edge lengths.
pub fn orient(p: Point, q: Point, r: Point) -> i8 {
    let u = q - p;
    let v = r - p;
    let det = u.cross(v);
    let bound = EPS_COLLINEAR * u.norm() * v.norm();
    if det > bound {
        1
    } else if det < -bound {
        -1
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSite {
    pub site: Point,
    pub weight: f64,
}

impl WeightedSite {
    pub const fn new(site: Point, weight: f64) -> Self {
        Self { site, weight }
    }

    /// Additively weighted distance `weight + |x - site|`.
    #[inline]
    pub fn value_at(&self, x: Point) -> f64 {
        self.weight + self.site.dist(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BisectorKind {
    Line,
    HyperbolaBranch,
    Ray,
    Empty,
}

/// Tie locus of two weighted sites.
///
/// Line and hyperbola curves are parameterized by `s`, the signed coordinate
/// along the unit normal `v` of the focal axis, measured from the midpoint
/// `m` of the sites:
///
/// ```text
/// x(s) = m + u * sigma * alpha * sqrt(1 + (s / beta)^2) + v * s
/// ```
///
/// where `u` points from `a` to `b`, `c = |ab| / 2`, `alpha = |w_b - w_a| / 2`,
/// `beta = sqrt(c^2 - alpha^2)` and `sigma = sign(w_b - w_a)`. For lines
/// `alpha = 0`. The map `s -> x(s)` is a bijection onto the curve and
/// `s = (x - m) . v`. Rays start at the heavier site and run away from the
/// lighter one; their parameter is the distance from the start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectorCurve {
    pub site_a: WeightedSite,
    pub site_b: WeightedSite,
    pub kind: BisectorKind,
    center: Point,
    u: Point,
    v: Point,
    half_focal: f64,
    alpha: f64,
    beta: f64,
    sigma: f64,
}

/// Scale used when no domain is at hand: the extent of the sites and weights.
fn intrinsic_scale(a: &WeightedSite, b: &WeightedSite) -> f64 {
    let span = a.site.dist(b.site) + (a.weight - b.weight).abs();
    let mag = a.site.norm().max(b.site.norm());
    span.max(mag * 1e-3).max(f64::MIN_POSITIVE)
}

/// Builds the tie curve of `a` and `b` with `eps_tie = 1e-9 * scale`, where
/// the scale comes from the sites themselves.
pub fn make_bisector(a: WeightedSite, b: WeightedSite) -> Result<BisectorCurve, GeomError> {
    let eps = 1e-9 * intrinsic_scale(&a, &b);
    make_bisector_with_tolerance(a, b, eps)
}

pub fn make_bisector_with_tolerance(
    a: WeightedSite,
    b: WeightedSite,
    eps_tie: f64,
) -> Result<BisectorCurve, GeomError> {
    let ab = b.site - a.site;
    let dist = ab.norm();
    let gap = b.weight - a.weight;
    let center = a.site.lerp(b.site, 0.5);
    let mut curve = BisectorCurve {
        site_a: a,
        site_b: b,
        kind: BisectorKind::Empty,
        center,
        u: Point::new(1.0, 0.0),
        v: Point::new(0.0, 1.0),
        half_focal: dist / 2.0,
        alpha: gap.abs() / 2.0,
        beta: 0.0,
        sigma: if gap >= 0.0 { 1.0 } else { -1.0 },
    };
    if dist == 0.0 {
        if gap == 0.0 {
            return Err(GeomError::DegenerateEverywhere);
        }
        return Ok(curve);
    }
    curve.u = ab * (1.0 / dist);
    curve.v = curve.u.perp();
    curve.kind = if gap.abs() < eps_tie {
        curve.alpha = 0.0;
        curve.beta = curve.half_focal;
        BisectorKind::Line
    } else if (gap.abs() - dist).abs() <= eps_tie {
        BisectorKind::Ray
    } else if gap.abs() > dist {
        BisectorKind::Empty
    } else {
        let c = curve.half_focal;
        let al = curve.alpha;
        curve.beta = ((c - al) * (c + al)).sqrt();
        BisectorKind::HyperbolaBranch
    };
    Ok(curve)
}

impl BisectorCurve {
    /// Tie function `w_a + |x - a| - w_b - |x - b|`; zero exactly on the curve.
    #[inline]
    pub fn tie(&self, x: Point) -> f64 {
        self.site_a.value_at(x) - self.site_b.value_at(x)
    }

    pub fn is_empty(&self) -> bool {
        self.kind == BisectorKind::Empty
    }

    /// Whether both curves carry the same locus: same unordered site pair and
    /// the same weight gap.
    pub fn same_locus(&self, other: &BisectorCurve) -> bool {
        let gap = |c: &BisectorCurve| c.site_b.weight - c.site_a.weight;
        if self.site_a.site == other.site_a.site && self.site_b.site == other.site_b.site {
            gap(self) == gap(other)
        } else if self.site_a.site == other.site_b.site && self.site_b.site == other.site_a.site {
            gap(self) == -gap(other)
        } else {
            false
        }
    }

    /// Start and direction of a ray curve.
    fn ray_frame(&self) -> (Point, Point) {
        if self.sigma > 0.0 {
            (self.site_b.site, self.u)
        } else {
            (self.site_a.site, -self.u)
        }
    }

    pub fn point_at(&self, s: f64) -> Point {
        match self.kind {
            BisectorKind::Ray => {
                let (start, dir) = self.ray_frame();
                start + dir * s
            }
            _ => {
                let along = if self.alpha == 0.0 {
                    0.0
                } else {
                    self.sigma * self.alpha * (s / self.beta).hypot(1.0)
                };
                self.center + self.u * along + self.v * s
            }
        }
    }

    pub fn param_of(&self, x: Point) -> f64 {
        match self.kind {
            BisectorKind::Ray => {
                let (start, dir) = self.ray_frame();
                (x - start).dot(dir)
            }
            _ => (x - self.center).dot(self.v),
        }
    }

    /// Lower bound of the parameter domain (`0` for rays, unbounded otherwise).
    pub fn param_min(&self) -> f64 {
        match self.kind {
            BisectorKind::Ray => 0.0,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Upper bound on `|dx/ds|`; the curve is Lipschitz in its parameter.
    pub fn speed_bound(&self) -> f64 {
        match self.kind {
            BisectorKind::HyperbolaBranch => self.half_focal / self.beta,
            _ => 1.0,
        }
    }

    /// The apex: the point of the curve closest to the focal midpoint.
    pub fn apex(&self) -> Point {
        match self.kind {
            BisectorKind::Ray => self.ray_frame().0,
            _ => self.point_at(0.0),
        }
    }

    /// Parameter interval covering every curve point within distance `radius`
    /// of `around`.
    pub fn param_range_within(&self, around: Point, radius: f64) -> (f64, f64) {
        match self.kind {
            BisectorKind::Ray => {
                let (start, _) = self.ray_frame();
                (0.0, (start.dist(around) + radius).max(0.0))
            }
            _ => {
                // |s| = |(x - m) . v| <= |x - m| <= |m - around| + radius
                let r = self.center.dist(around) + radius;
                (-r, r)
            }
        }
    }

    /// Axis-aligned bounds of the curve restricted to `[lo, hi]`. Both frame
    /// coordinates are monotone on each side of the apex, so the piece lies in
    /// the frame-aligned box of its endpoints (and apex).
    pub fn param_bbox(&self, lo: f64, hi: f64) -> (Point, Point) {
        let mut ends = vec![self.point_at(lo), self.point_at(hi)];
        if self.kind == BisectorKind::HyperbolaBranch && lo < 0.0 && hi > 0.0 {
            ends.push(self.point_at(0.0));
        }
        let corners: Vec<Point> = if self.kind == BisectorKind::HyperbolaBranch {
            let fx: Vec<f64> = ends.iter().map(|p| (*p - self.center).dot(self.u)).collect();
            let fy: Vec<f64> = ends.iter().map(|p| (*p - self.center).dot(self.v)).collect();
            let (x0, x1) = (fx.iter().cloned().fold(f64::INFINITY, f64::min), fx.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            let (y0, y1) = (fy.iter().cloned().fold(f64::INFINITY, f64::min), fy.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
                .iter()
                .map(|&(x, y)| self.center + self.u * x + self.v * y)
                .collect()
        } else {
            ends
        };
        let mut min = corners[0];
        let mut max = corners[0];
        for p in &corners[1..] {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        (min, max)
    }
}

/// Points where three weighted sites tie, i.e. centers of circles touching
/// three weighted circles.
///
/// Writing `r` for the distance to `a`, the pairwise differences of the
/// squared distance equations are linear in `x` and `r`, so `x` moves on a
/// line as `r` varies and the remaining equation is a quadratic in `r`.
/// Returns `None` when the three sites are collinear and the linear system is
/// singular.
pub fn weighted_circumcenters(a: WeightedSite, b: WeightedSite, c: WeightedSite, eps_eval: f64) -> Option<Vec<Point>> {
    let pb = b.site - a.site;
    let pc = c.site - a.site;
    let det = pb.cross(pc);
    if det.abs() <= 1e-9 * pb.norm() * pc.norm() {
        return None;
    }
    let (db, dc) = (b.weight - a.weight, c.weight - a.weight);
    let (kb, kc) = (0.5 * (pb.dot(pb) - db * db), 0.5 * (pc.dot(pc) - dc * dc));
    // x = x0 + r * x1 solves pb.x = kb + db r, pc.x = kc + dc r.
    let solve = |u: f64, v: f64| Point::new((u * pc.y - v * pb.y) / det, (pb.x * v - pc.x * u) / det);
    let x0 = solve(kb, kc);
    let x1 = solve(db, dc);
    let qa = x1.dot(x1) - 1.0;
    let qb = 2.0 * x0.dot(x1);
    let qc = x0.dot(x0);
    let mut rs: Vec<f64> = Vec::with_capacity(2);
    if qa.abs() <= 1e-14 * (qb.abs() + qc.abs()).max(1.0) {
        if qb != 0.0 {
            rs.push(-qc / qb);
        }
    } else {
        let mut disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 && disc > -1e-10 * (qb * qb + (4.0 * qa * qc).abs()) {
            disc = 0.0;
        }
        if disc >= 0.0 {
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            if q != 0.0 {
                rs.push(q / qa);
                rs.push(qc / q);
            } else {
                rs.push(0.0);
            }
        }
    }
    let mut out: Vec<Point> = Vec::with_capacity(2);
    for r in rs {
        if !r.is_finite() {
            continue;
        }
        let x = a.site + x0 + x1 * r;
        let va = a.value_at(x);
        if (va - b.value_at(x)).abs() <= eps_eval
            && (va - c.value_at(x)).abs() <= eps_eval
            && !out.iter().any(|y| y.dist(x) <= eps_eval)
        {
            out.push(x);
        }
    }
    Some(out)
}

/// Solutions `t` of `w_a + |p + t d - a| = w_b + |p + t d - b|` on the line
/// through `p` with direction `d`, restricted to `[t_lo, t_hi]`.
///
/// Squaring twice reduces the tie equation to a quadratic in `t`; each root is
/// then polished with Newton steps on the unsquared tie function and rejected
/// if the residual stays above `eps_eval`.
pub fn line_tie_params(
    curve: &BisectorCurve,
    p: Point,
    d: Point,
    t_lo: f64,
    t_hi: f64,
    eps_eval: f64,
) -> Vec<f64> {
    if curve.is_empty() || d.dot(d) == 0.0 {
        return Vec::new();
    }
    // Local frame centered at the focal midpoint.
    let m = curve.center;
    let a = curve.site_a.site - m;
    let b = curve.site_b.site - m;
    let p0 = p - m;
    let delta = curve.site_b.weight - curve.site_a.weight;
    let ba = b - a;
    // L(t) = |x-a|^2 - |x-b|^2 - delta^2 = 2 x.(b-a) + |a|^2 - |b|^2 - delta^2
    let l0 = 2.0 * p0.dot(ba) + a.dot(a) - b.dot(b) - delta * delta;
    let l1 = 2.0 * d.dot(ba);
    let mut roots: Vec<f64> = Vec::with_capacity(2);
    if curve.kind == BisectorKind::Line {
        if l1 != 0.0 {
            roots.push(-l0 / l1);
        }
    } else {
        let pb = p0 - b;
        let qa = l1 * l1 - 4.0 * delta * delta * d.dot(d);
        let qb = 2.0 * l0 * l1 - 8.0 * delta * delta * d.dot(pb);
        let qc = l0 * l0 - 4.0 * delta * delta * pb.dot(pb);
        let mag = qa.abs().max(qb.abs()).max(qc.abs());
        if mag == 0.0 {
            return Vec::new();
        }
        if qa.abs() <= 1e-14 * mag {
            if qb != 0.0 {
                roots.push(-qc / qb);
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            let disc = if disc < 0.0 && disc > -1e-10 * qb * qb { 0.0 } else { disc };
            if disc >= 0.0 {
                let sq = disc.sqrt();
                let q = -0.5 * (qb + qb.signum() * sq);
                if q != 0.0 {
                    roots.push(q / qa);
                    roots.push(qc / q);
                } else {
                    roots.push(-qb / (2.0 * qa));
                }
            }
        }
    }

    let f = |t: f64| curve.tie(p + d * t);
    let speed = d.norm();
    let slack = eps_eval / speed;
    let mut out: Vec<f64> = Vec::with_capacity(2);
    for t0 in roots {
        if !t0.is_finite() || t0 < t_lo - 1e3 * slack || t0 > t_hi + 1e3 * slack {
            continue;
        }
        let t = newton_polish(&f, t0, speed);
        if t < t_lo - slack || t > t_hi + slack {
            continue;
        }
        let t = t.clamp(t_lo, t_hi);
        if f(t).abs() <= eps_eval.max(4.0 * f64::EPSILON * curve_magnitude(curve, p + d * t)) {
            out.push(t);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() * speed <= eps_eval);
    out
}

fn curve_magnitude(curve: &BisectorCurve, x: Point) -> f64 {
    curve.site_a.value_at(x).abs() + curve.site_b.value_at(x).abs()
}

/// A few Newton steps on a scalar function; keeps the best iterate.
fn newton_polish(f: &impl Fn(f64) -> f64, t0: f64, speed: f64) -> f64 {
    let mut t = t0;
    let mut ft = f(t);
    for _ in 0..8 {
        if ft == 0.0 {
            break;
        }
        let h = (t.abs() + 1.0) * 1e-7;
        let df = (f(t + h) - f(t - h)) / (2.0 * h);
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = ft / df;
        // A Newton step should never move far from the algebraic root.
        if step.abs() * speed > 1e-3 * (t.abs() * speed + 1.0) {
            break;
        }
        let tn = t - step;
        let fn_ = f(tn);
        if fn_.abs() >= ft.abs() {
            break;
        }
        t = tn;
        ft = fn_;
    }
    t
}

/// Points of `segment` where the tie function of `curve` vanishes, ordered
/// from `segment.a` to `segment.b`.
pub fn intersect_curve_segment(curve: &BisectorCurve, segment: &Segment, eps_eval: f64) -> Vec<Point> {
    segment_tie_params(curve, segment, eps_eval)
        .into_iter()
        .map(|t| segment.at(t))
        .collect()
}

/// Like [`intersect_curve_segment`] but returns the segment parameters.
pub fn segment_tie_params(curve: &BisectorCurve, segment: &Segment, eps_eval: f64) -> Vec<f64> {
    match curve.kind {
        BisectorKind::Empty => Vec::new(),
        BisectorKind::Ray => {
            let (start, dir) = curve.ray_frame();
            let far = Segment::new(start, start + dir * (segment_reach(start, segment) + 1.0));
            segment_segment_params(segment, &far, eps_eval)
        }
        _ => line_tie_params(curve, segment.a, segment.b - segment.a, 0.0, 1.0, eps_eval),
    }
}

fn segment_reach(from: Point, seg: &Segment) -> f64 {
    from.dist(seg.a).max(from.dist(seg.b))
}

/// Parameters on `s` of its intersection with `t`. A collinear overlap yields
/// the overlap's two ends.
fn segment_segment_params(s: &Segment, t: &Segment, eps: f64) -> Vec<f64> {
    let d = s.b - s.a;
    let e = t.b - t.a;
    let denom = d.cross(e);
    let len_d = d.norm();
    let len_e = e.norm();
    if len_d == 0.0 || len_e == 0.0 {
        return Vec::new();
    }
    if denom.abs() <= 1e-12 * len_d * len_e {
        // Parallel: overlapping only when collinear.
        if (t.a - s.a).cross(d).abs() / len_d > eps {
            return Vec::new();
        }
        let proj = |p: Point| (p - s.a).dot(d) / (len_d * len_d);
        let (mut lo, mut hi) = (proj(t.a), proj(t.b));
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        let lo = lo.max(0.0);
        let hi = hi.min(1.0);
        if lo > hi {
            return Vec::new();
        }
        return if hi - lo <= eps / len_d { vec![lo] } else { vec![lo, hi] };
    }
    let w = t.a - s.a;
    let ts = w.cross(e) / denom;
    let tt = w.cross(d) / denom;
    let ss = eps / len_d;
    let st = eps / len_e;
    if ts < -ss || ts > 1.0 + ss || tt < -st || tt > 1.0 + st {
        return Vec::new();
    }
    vec![ts.clamp(0.0, 1.0)]
}

/// Locates the zeros of `g` on `[lo, hi]`.
///
/// `lipschitz` must bound `|g'|` on the interval. Sign changes are bisected to
/// machine precision; same-sign subintervals are discarded when the Lipschitz
/// bound proves they are zero-free and otherwise split further. A subinterval
/// narrower than `xtol` whose smaller endpoint value is within `ytol` of zero
/// is reported as a tangential root at its best endpoint.
pub fn isolate_roots(
    g: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    lipschitz: f64,
    initial_samples: usize,
    xtol: f64,
    ytol: f64,
) -> Vec<f64> {
    let mut roots = Vec::new();
    if !(hi > lo) {
        let v = g(lo);
        if v.abs() <= ytol {
            roots.push(lo);
        }
        return roots;
    }
    let k = initial_samples.max(1);
    let h = (hi - lo) / k as f64;
    let mut prev_s = lo;
    let mut prev_g = g(lo);
    if prev_g == 0.0 {
        roots.push(lo);
    }
    for i in 1..=k {
        let s = if i == k { hi } else { lo + h * i as f64 };
        let gs = g(s);
        scan(g, prev_s, prev_g, s, gs, lipschitz, xtol, ytol, 0, &mut roots);
        if gs == 0.0 {
            roots.push(s);
        }
        prev_s = s;
        prev_g = gs;
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= xtol);
    // Neighbouring reports from one flat touching region collapse to one.
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(last) if g(0.5 * (*last + r)).abs() <= ytol => {
                if g(r).abs() < g(*last).abs() {
                    *last = r;
                }
            }
            _ => merged.push(r),
        }
    }
    merged
}

#[allow(clippy::too_many_arguments)]
fn scan(
    g: &impl Fn(f64) -> f64,
    a: f64,
    ga: f64,
    b: f64,
    gb: f64,
    lipschitz: f64,
    xtol: f64,
    ytol: f64,
    depth: u32,
    roots: &mut Vec<f64>,
) {
    if ga == 0.0 || gb == 0.0 {
        return;
    }
    if (ga < 0.0) != (gb < 0.0) {
        roots.push(bisect(g, a, ga, b));
        return;
    }
    let w = b - a;
    if ga.abs() + gb.abs() > lipschitz * w {
        return;
    }
    if ga.abs().max(gb.abs()) <= ytol {
        roots.push(if ga.abs() <= gb.abs() { a } else { b });
        return;
    }
    if w <= xtol || depth >= 60 {
        if ga.abs().min(gb.abs()) <= ytol {
            roots.push(if ga.abs() <= gb.abs() { a } else { b });
        }
        return;
    }
    let m = 0.5 * (a + b);
    let gm = g(m);
    if gm == 0.0 {
        roots.push(m);
        return;
    }
    scan(g, a, ga, m, gm, lipschitz, xtol, ytol, depth + 1, roots);
    scan(g, m, gm, b, gb, lipschitz, xtol, ytol, depth + 1, roots);
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut ga: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    if ga.abs() <= g(b).abs() {
        a
    } else {
        b
    }
}

/// Intersections of two tie curves inside the square of half-width
/// `half_width` around `center`, deduplicated within `eps_merge`.
pub fn intersect_curves_in(
    c1: &BisectorCurve,
    c2: &BisectorCurve,
    center: Point,
    half_width: f64,
    eps_eval: f64,
    eps_merge: f64,
) -> Result<Vec<Point>, GeomError> {
    if c1.is_empty() || c2.is_empty() {
        return Ok(Vec::new());
    }
    if c1.same_locus(c2) {
        return Err(GeomError::OverlappingCurves);
    }
    let radius = half_width * std::f64::consts::SQRT_2;
    // Curves that are straight are intersected in closed form.
    let (straight, other) = match (c1.kind, c2.kind) {
        (BisectorKind::HyperbolaBranch, BisectorKind::HyperbolaBranch) => (None, c1),
        (BisectorKind::HyperbolaBranch, _) => (Some(c2), c1),
        _ => (Some(c1), c2),
    };
    let mut pts: Vec<Point> = Vec::new();
    if let Some(line) = straight {
        let (lo, hi) = line.param_range_within(center, radius);
        let seg = Segment::new(line.point_at(lo), line.point_at(hi));
        if other.kind == BisectorKind::Ray {
            let (olo, ohi) = other.param_range_within(center, radius);
            let oseg = Segment::new(other.point_at(olo), other.point_at(ohi));
            for t in segment_tie_params(line, &oseg, eps_eval) {
                pts.push(oseg.at(t));
            }
        } else {
            for t in line_tie_params(other, seg.a, seg.b - seg.a, 0.0, 1.0, eps_eval) {
                pts.push(seg.at(t));
            }
            if pts.is_empty()
                && line.kind == BisectorKind::Line
                && other.kind == BisectorKind::Line
                && parallel_overlap(line, other, eps_eval)
            {
                return Err(GeomError::OverlappingCurves);
            }
        }
    } else {
        let (lo, hi) = c1.param_range_within(center, radius);
        // Sample uniformly in asinh(s / beta), which is close to uniform in
        // arc length on both the apex and the asymptotic parts.
        let beta = c1.beta.max(f64::MIN_POSITIVE);
        let (tlo, thi) = ((lo / beta).asinh(), (hi / beta).asinh());
        let g = |tau: f64| c2.tie(c1.point_at(beta * tau.sinh()));
        // |d/dtau x| = beta cosh(tau) |dx/ds| <= cosh(tau) * c
        let lip = 2.0 * c1.half_focal * thi.abs().max(tlo.abs()).cosh();
        let roots = isolate_roots(&g, tlo, thi, lip, 512, 1e-14 * (thi - tlo), eps_eval);
        for tau in roots {
            pts.push(c1.point_at(beta * tau.sinh()));
        }
    }
    let lo = center - Point::new(half_width, half_width);
    let hi = center + Point::new(half_width, half_width);
    pts.retain(|p| {
        p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && {
            let scale = 1.0 + p.norm();
            c1.tie(*p).abs() <= eps_eval * scale && c2.tie(*p).abs() <= eps_eval * scale
        }
    });
    Ok(dedup_points(pts, eps_merge))
}

fn parallel_overlap(l1: &BisectorCurve, l2: &BisectorCurve, eps: f64) -> bool {
    l1.u.cross(l2.u).abs() <= 1e-12 && l2.tie(l1.center).abs() <= eps
}

/// Intersections of two tie curves, searched inside a window of 1000 times
/// the sites' extent around their centroid.
pub fn intersect_curves(c1: &BisectorCurve, c2: &BisectorCurve) -> Result<Vec<Point>, GeomError> {
    let sites = [c1.site_a, c1.site_b, c2.site_a, c2.site_b];
    let centroid = sites.iter().fold(Point::default(), |acc, s| acc + s.site) * 0.25;
    let extent = sites
        .iter()
        .map(|s| s.site.dist(centroid) + s.weight.abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    intersect_curves_in(c1, c2, centroid, 1e3 * extent, 1e-9 * extent, 1e-7 * extent)
}

/// Removes points within `eps` of an earlier point. Keeps input order.
pub fn dedup_points(pts: Vec<Point>, eps: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| q.dist(p) <= eps) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(x: f64, y: f64, w: f64) -> WeightedSite {
        WeightedSite::new(Point::new(x, y), w)
    }

    #[test]
    fn orient_signs() {
        let o = Point::new(0.0, 0.0);
        assert_eq!(orient(o, Point::new(1.0, 0.0), Point::new(0.0, 1.0)), 1);
        assert_eq!(orient(o, Point::new(1.0, 0.0), Point::new(2.0, 0.0)), 0);
        assert_eq!(orient(o, Point::new(0.0, 1.0), Point::new(1.0, 0.0)), -1);
    }

    #[test]
    fn equal_weights_give_perpendicular_bisector() {
        let c = make_bisector(ws(0.0, 0.0, 0.0), ws(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(c.kind, BisectorKind::Line);
        for s in [-3.0, 0.0, 1.5] {
            let p = c.point_at(s);
            assert!((p.x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn full_gap_gives_ray_from_heavier_site() {
        let c = make_bisector(ws(0.0, 0.0, 0.0), ws(2.0, 0.0, 2.0)).unwrap();
        assert_eq!(c.kind, BisectorKind::Ray);
        assert_eq!(c.apex(), Point::new(2.0, 0.0));
        assert_eq!(c.point_at(3.0), Point::new(5.0, 0.0));
    }

    #[test]
    fn hyperbola_apex() {
        let c = make_bisector(ws(0.0, 0.0, 0.0), ws(2.0, 0.0, 1.0)).unwrap();
        assert_eq!(c.kind, BisectorKind::HyperbolaBranch);
        let apex = c.apex();
        assert!((apex.x - 1.5).abs() < 1e-15 && apex.y.abs() < 1e-15);
        for s in [-10.0, -1.0, 0.3, 7.0] {
            assert!(c.tie(c.point_at(s)).abs() < 1e-12);
            assert!((c.param_of(c.point_at(s)) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_gap_is_empty_and_coincident_sites_error() {
        let c = make_bisector(ws(0.0, 0.0, 0.0), ws(1.0, 0.0, 3.0)).unwrap();
        assert_eq!(c.kind, BisectorKind::Empty);
        let c = make_bisector(ws(1.0, 1.0, 0.0), ws(1.0, 1.0, 2.0)).unwrap();
        assert_eq!(c.kind, BisectorKind::Empty);
        assert_eq!(
            make_bisector(ws(1.0, 1.0, 2.0), ws(1.0, 1.0, 2.0)),
            Err(GeomError::DegenerateEverywhere)
        );
    }

    #[test]
    fn near_degenerate_gap_classified_as_ray() {
        let c = make_bisector(ws(0.0, 0.0, 0.0), ws(2.0, 0.0, 2.0 - 1e-12)).unwrap();
        assert_eq!(c.kind, BisectorKind::Ray);
    }

    #[test]
    fn line_line_intersections() {
        let x1 = make_bisector(ws(0.0, 0.0, 0.0), ws(2.0, 0.0, 0.0)).unwrap();
        let y1 = make_bisector(ws(0.0, 0.0, 0.0), ws(0.0, 2.0, 0.0)).unwrap();
        let x2 = make_bisector(ws(0.0, 0.0, 0.0), ws(4.0, 0.0, 0.0)).unwrap();
        let hits = intersect_curves(&x1, &y1).unwrap();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].dist(Point::new(1.0, 1.0)) < 1e-12);
        assert!(intersect_curves(&x1, &x2).unwrap().is_empty());
        assert_eq!(intersect_curves(&x1, &x1), Err(GeomError::OverlappingCurves));
    }

    #[test]
    fn curve_segment_examples() {
        let x1 = make_bisector(ws(0.0, 0.0, 0.0), ws(2.0, 0.0, 0.0)).unwrap();
        let seg = Segment::new(Point::new(0.0, 0.0), Point::new(2.0, 0.0));
        let hits = intersect_curve_segment(&x1, &seg, 1e-9);
        assert_eq!(hits.len(), 1);
        assert!(hits[0].dist(Point::new(1.0, 0.0)) < 1e-15);
        let x5 = make_bisector(ws(0.0, 0.0, 0.0), ws(10.0, 0.0, 0.0)).unwrap();
        assert!(intersect_curve_segment(&x5, &seg, 1e-9).is_empty());
    }

    #[test]
    fn isolate_roots_finds_tangency() {
        let g = |s: f64| (s - 0.3) * (s - 0.3);
        let r = isolate_roots(&g, 0.0, 1.0, 2.0, 8, 1e-10, 1e-12);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.3).abs() < 1e-5);
        let g = |s: f64| (s - 0.25) * (s - 0.75);
        let r = isolate_roots(&g, 0.0, 1.0, 2.0, 1, 1e-12, 1e-12);
        assert_eq!(r.len(), 2);
    }
}
