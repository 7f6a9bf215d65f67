//! Bounded convex domains in one and two dimensions.
//!
//! Every shape here is convex, so a ray leaving an interior point crosses the
//! boundary exactly once and a ray from an exterior point meets the domain in
//! at most one chord. The quadrature layer relies on both facts.
//!
//! The rectangle has corners and is therefore only piecewise `C^{1,1}`;
//! interval and disc satisfy interior and exterior sphere conditions exactly.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::RobinWeight;

/// A point in R^1 or R^2. One-dimensional points keep their second
/// coordinate at zero so that ray arithmetic is shared between dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    dim: u8,
    c: [f64; 2],
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let p = match coords {
            [x] => Point::d1(*x),
            [x, y] => Point::d2(*x, *y),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "points must have 1 or 2 coordinates, got {}",
                    coords.len()
                )))
            }
        };
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "point {coords:?} has non-finite coordinates"
            )));
        }
        Ok(p)
    }

    pub const fn d1(x: f64) -> Self {
        Point { dim: 1, c: [x, 0.0] }
    }

    pub const fn d2(x: f64, y: f64) -> Self {
        Point { dim: 2, c: [x, y] }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    pub fn x(&self) -> f64 {
        self.c[0]
    }

    pub fn y(&self) -> f64 {
        self.c[1]
    }

    pub fn raw(&self) -> [f64; 2] {
        self.c
    }

    pub fn norm(&self) -> f64 {
        self.c[0].hypot(self.c[1])
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.c[0] - other.c[0]).hypot(self.c[1] - other.c[1])
    }

    /// `self + r * dir`, where `dir` is a unit direction of matching dimension.
    pub fn along(&self, dir: &Direction, r: f64) -> Point {
        Point {
            dim: self.dim,
            c: [self.c[0] + r * dir.0[0], self.c[1] + r * dir.0[1]],
        }
    }

    pub fn sub(&self, other: &Point) -> [f64; 2] {
        [self.c[0] - other.c[0], self.c[1] - other.c[1]]
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Hashable key for caches keyed on exact node positions.
    pub fn key(&self) -> [u64; 2] {
        [self.c[0].to_bits(), self.c[1].to_bits()]
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Unit direction. In 1D this is `(+1, 0)` or `(-1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(pub [f64; 2]);

impl Direction {
    pub fn from_angle(theta: f64) -> Self {
        Direction([theta.cos(), theta.sin()])
    }

    pub fn positive() -> Self {
        Direction([1.0, 0.0])
    }

    pub fn negative() -> Self {
        Direction([-1.0, 0.0])
    }

    pub fn neg(&self) -> Self {
        Direction([-self.0[0], -self.0[1]])
    }

    pub fn dot(&self, v: [f64; 2]) -> f64 {
        self.0[0] * v[0] + self.0[1] * v[1]
    }
}

/// Bounded open domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Ball { center: [f64; 2], radius: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn ball(center: [f64; 2], radius: f64) -> Result<Self> {
        let d = Domain::Ball { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        let d = Domain::Rectangle { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Domain::Interval { a, b } => a.is_finite() && b.is_finite() && a < b,
            Domain::Ball { center, radius } => {
                center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0
            }
            Domain::Rectangle { lo, hi } => {
                lo.iter().chain(hi).all(|c| c.is_finite()) && lo[0] < hi[0] && lo[1] < hi[1]
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("degenerate domain {self:?}")))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        if !p.is_finite() {
            return Err(Error::InvalidParameter("non-finite point".into()));
        }
        Ok(())
    }

    /// Open-set membership: boundary points are not contained.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        self.check(p)?;
        Ok(self.contains_unchecked(p))
    }

    pub(crate) fn contains_unchecked(&self, p: &Point) -> bool {
        match self {
            Domain::Interval { a, b } => *a < p.x() && p.x() < *b,
            Domain::Ball { center, radius } => {
                (p.x() - center[0]).hypot(p.y() - center[1]) < *radius
            }
            Domain::Rectangle { lo, hi } => {
                lo[0] < p.x() && p.x() < hi[0] && lo[1] < p.y() && p.y() < hi[1]
            }
        }
    }

    /// `dist(p, boundary)`, exact for every shape.
    pub fn boundary_distance(&self, p: &Point) -> Result<f64> {
        self.check(p)?;
        Ok(self.boundary_distance_unchecked(p))
    }

    pub(crate) fn boundary_distance_unchecked(&self, p: &Point) -> f64 {
        match self {
            Domain::Interval { a, b } => {
                let x = p.x();
                if x <= *a {
                    a - x
                } else if x >= *b {
                    x - b
                } else {
                    (x - a).min(b - x)
                }
            }
            Domain::Ball { center, radius } => {
                ((p.x() - center[0]).hypot(p.y() - center[1]) - radius).abs()
            }
            Domain::Rectangle { lo, hi } => {
                let (x, y) = (p.x(), p.y());
                if self.contains_unchecked(p) {
                    (x - lo[0]).min(hi[0] - x).min(y - lo[1]).min(hi[1] - y)
                } else {
                    let dx = (lo[0] - x).max(0.0).max(x - hi[0]);
                    let dy = (lo[1] - y).max(0.0).max(y - hi[1]);
                    dx.hypot(dy)
                }
            }
        }
    }

    /// True when `p` is strictly outside the closure.
    pub fn is_exterior(&self, p: &Point) -> Result<bool> {
        self.check(p)?;
        Ok(!self.contains_unchecked(p) && self.boundary_distance_unchecked(p) > 0.0)
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]).hypot(hi[1] - lo[1]),
        }
    }

    /// Lebesgue measure `|Omega|`.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Ball { radius, .. } => PI * radius * radius,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
        }
    }

    /// Circumcenter of the shape.
    pub fn center(&self) -> Point {
        match self {
            Domain::Interval { a, b } => Point::d1(0.5 * (a + b)),
            Domain::Ball { center, .. } => Point::d2(center[0], center[1]),
            Domain::Rectangle { lo, hi } => Point::d2(0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])),
        }
    }

    /// Distance from an interior point `p` along `dir` to the boundary.
    pub fn ray_exit(&self, p: &Point, dir: &Direction) -> f64 {
        match self {
            Domain::Interval { a, b } => {
                if dir.0[0] > 0.0 {
                    b - p.x()
                } else {
                    p.x() - a
                }
            }
            Domain::Ball { center, radius } => {
                let q = [p.x() - center[0], p.y() - center[1]];
                let qd = dir.dot(q);
                let c = q[0] * q[0] + q[1] * q[1] - radius * radius;
                // c < 0 inside, so the larger root is positive.
                let disc = (qd * qd - c).max(0.0).sqrt();
                if qd > 0.0 {
                    // -qd + disc, rewritten to avoid cancellation.
                    -c / (qd + disc)
                } else {
                    disc - qd
                }
            }
            Domain::Rectangle { lo, hi } => {
                let mut t = f64::INFINITY;
                for i in 0..2 {
                    let d = dir.0[i];
                    let c = p.raw()[i];
                    if d > 0.0 {
                        t = t.min((hi[i] - c) / d);
                    } else if d < 0.0 {
                        t = t.min((lo[i] - c) / d);
                    }
                }
                t
            }
        }
    }

    /// Chord of the ray `{z + r dir : r > 0}` through the domain, as
    /// `(r_in, length)`, for an exterior point `z`.
    pub fn chord(&self, z: &Point, dir: &Direction) -> Option<(f64, f64)> {
        match self {
            Domain::Interval { a, b } => {
                let x = z.x();
                if x >= *b && dir.0[0] < 0.0 {
                    Some((x - b, b - a))
                } else if x <= *a && dir.0[0] > 0.0 {
                    Some((a - x, b - a))
                } else {
                    None
                }
            }
            Domain::Ball { center, radius } => {
                let q = [z.x() - center[0], z.y() - center[1]];
                let qd = dir.dot(q);
                let c = q[0] * q[0] + q[1] * q[1] - radius * radius;
                let disc = qd * qd - c;
                if disc <= 0.0 || qd >= 0.0 {
                    return None;
                }
                let h = disc.sqrt();
                // r_in = -qd - h = c / (-qd + h)
                let r_in = c / (h - qd);
                Some((r_in.max(0.0), 2.0 * h))
            }
            Domain::Rectangle { lo, hi } => {
                let mut t0 = f64::NEG_INFINITY;
                let mut t1 = f64::INFINITY;
                for i in 0..2 {
                    let d = dir.0[i];
                    let c = z.raw()[i];
                    if d == 0.0 {
                        if c <= lo[i] || c >= hi[i] {
                            return None;
                        }
                    } else {
                        let (ta, tb) = ((lo[i] - c) / d, (hi[i] - c) / d);
                        t0 = t0.max(ta.min(tb));
                        t1 = t1.min(ta.max(tb));
                    }
                }
                let t0 = t0.max(0.0);
                if t1 > t0 {
                    Some((t0, t1 - t0))
                } else {
                    None
                }
            }
        }
    }

    /// Polar angles, seen from `p`, at which the boundary has corners.
    pub fn corner_angles(&self, p: &Point) -> Vec<f64> {
        match self {
            Domain::Rectangle { lo, hi } => {
                let mut out: Vec<f64> = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
                    .iter()
                    .map(|c| (c[1] - p.y()).atan2(c[0] - p.x()).rem_euclid(TAU))
                    .collect();
                out.sort_by(f64::total_cmp);
                out
            }
            _ => Vec::new(),
        }
    }

    /// Angular window `(theta_lo, theta_hi)` of directions from an exterior
    /// 2D point `z` whose rays hit the domain, with interior breakpoints.
    pub fn visible_cone(&self, z: &Point) -> (f64, f64, Vec<f64>) {
        let c = self.center();
        let phi = (c.y() - z.y()).atan2(c.x() - z.x());
        match self {
            Domain::Ball { radius, .. } => {
                let dist = z.dist(&c);
                let half = (radius / dist).clamp(-1.0, 1.0).asin();
                (phi - half, phi + half, Vec::new())
            }
            Domain::Rectangle { lo, hi } => {
                let rel: Vec<f64> = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
                    .iter()
                    .map(|k| {
                        let a = (k[1] - z.y()).atan2(k[0] - z.x()) - phi;
                        (a + PI).rem_euclid(TAU) - PI
                    })
                    .collect();
                let lo_a = rel.iter().copied().fold(f64::INFINITY, f64::min);
                let hi_a = rel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut breaks: Vec<f64> = rel
                    .iter()
                    .filter(|a| **a > lo_a + 1e-14 && **a < hi_a - 1e-14)
                    .map(|a| a + phi)
                    .collect();
                breaks.sort_by(f64::total_cmp);
                (phi + lo_a, phi + hi_a, breaks)
            }
            Domain::Interval { .. } => (0.0, 0.0, Vec::new()),
        }
    }

    /// Boundary point at parameter `t` in `[0, 1)`.
    pub fn boundary_point(&self, t: f64) -> Point {
        let t = t.rem_euclid(1.0);
        match self {
            Domain::Interval { a, b } => Point::d1(if t < 0.5 { *a } else { *b }),
            Domain::Ball { center, radius } => {
                let th = TAU * t;
                Point::d2(center[0] + radius * th.cos(), center[1] + radius * th.sin())
            }
            Domain::Rectangle { lo, hi } => {
                let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
                let mut s = t * 2.0 * (w + h);
                if s < w {
                    return Point::d2(lo[0] + s, lo[1]);
                }
                s -= w;
                if s < h {
                    return Point::d2(hi[0], lo[1] + s);
                }
                s -= h;
                if s < w {
                    return Point::d2(hi[0] - s, hi[1]);
                }
                s -= w;
                Point::d2(lo[0], hi[1] - s)
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Domain::Interval { a, b } => ([*a, 0.0], [*b, 0.0]),
            Domain::Ball { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Domain::Rectangle { lo, hi } => (*lo, *hi),
        }
    }

    /// Uniform sample from the domain.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Domain::Interval { a, b } => Point::d1(a + (b - a) * rng.gen::<f64>()),
            Domain::Rectangle { lo, hi } => Point::d2(
                lo[0] + (hi[0] - lo[0]) * rng.gen::<f64>(),
                lo[1] + (hi[1] - lo[1]) * rng.gen::<f64>(),
            ),
            Domain::Ball { center, radius } => {
                let r = radius * rng.gen::<f64>().sqrt();
                let th = TAU * rng.gen::<f64>();
                Point::d2(center[0] + r * th.cos(), center[1] + r * th.sin())
            }
        }
    }
}

/// `dist(p, N_eps)` with `N_eps = {z outside Omega : beta(z) < 1 - eps}`.
///
/// `eps = 0` selects `supp(1 - beta)`, the closure of `{beta < 1}`. In one
/// dimension the set is assembled exactly from the region endpoints; in two
/// dimensions weights with regions fall back to ray marching with bisection
/// (march step `1e-2 * diameter`, bisection to `1e-9 * diameter`, 1440 directions).
pub fn support_distance(domain: &Domain, weight: &RobinWeight, p: &Point, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("threshold {eps} outside [0, 1]")));
    }
    domain.check(p)?;
    let threshold = 1.0 - eps;
    if weight.regions.is_empty() {
        return if weight.default < threshold {
            Ok(domain.boundary_distance_unchecked(p))
        } else {
            Err(Error::EmptySupport { threshold })
        };
    }
    match domain {
        Domain::Interval { a, b } => support_distance_1d(*a, *b, weight, p.x(), threshold),
        _ => support_distance_marching(domain, weight, p, threshold),
    }
}

fn support_distance_1d(a: f64, b: f64, weight: &RobinWeight, x: f64, threshold: f64) -> Result<f64> {
    let mut cuts = vec![a, b];
    for r in &weight.regions {
        let (lo, hi) = r.region.interval_1d();
        cuts.extend([lo, hi].into_iter().filter(|v| v.is_finite()));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    // Elementary open pieces between consecutive cuts, plus the two unbounded ends.
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(cuts.len() + 1);
    pieces.push((f64::NEG_INFINITY, cuts[0]));
    pieces.extend(cuts.windows(2).map(|w| (w[0], w[1])));
    pieces.push((cuts[cuts.len() - 1], f64::INFINITY));

    let mut best = f64::INFINITY;
    for (lo, hi) in pieces {
        let probe = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (false, true) => hi - 1.0,
            (true, false) => lo + 1.0,
            (false, false) => 0.0,
        };
        if (a..=b).contains(&probe) {
            continue;
        }
        if weight.value(&Point::d1(probe)) >= threshold {
            continue;
        }
        let d = if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            0.0
        };
        best = best.min(d);
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::EmptySupport { threshold })
    }
}

fn support_distance_marching(domain: &Domain, weight: &RobinWeight, p: &Point, threshold: f64) -> Result<f64> {
    let diam = domain.diameter();
    let in_set = |z: &Point| {
        !domain.contains_unchecked(z)
            && domain.boundary_distance_unchecked(z) > 0.0
            && weight.value(z) < threshold
    };
    let reach = 20.0 * diam + p.dist(&domain.center());
    let step = 1e-2 * diam;
    let mut best = f64::INFINITY;
    const DIRECTIONS: usize = 1440;
    for k in 0..DIRECTIONS {
        let dir = Direction::from_angle(TAU * k as f64 / DIRECTIONS as f64);
        let mut prev = 0.0;
        let mut r = step;
        while r < reach.min(best) {
            if in_set(&p.along(&dir, r)) {
                let (mut lo, mut hi) = (prev, r);
                while hi - lo > 1e-9 * diam {
                    let mid = 0.5 * (lo + hi);
                    if in_set(&p.along(&dir, mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                best = best.min(hi);
                break;
            }
            prev = r;
            r += step;
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::EmptySupport { threshold })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Region, WeightRegion};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shapes() -> Vec<Domain> {
        vec![
            Domain::interval(-1.0, 1.0).unwrap(),
            Domain::ball([0.3, -0.2], 1.2).unwrap(),
            Domain::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap(),
        ]
    }

    #[test]
    fn membership_examples() {
        let i = Domain::interval(-1.0, 1.0).unwrap();
        assert!(i.contains(&Point::d1(0.0)).unwrap());
        assert!(!i.contains(&Point::d1(1.0)).unwrap());
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert!(!b.contains(&Point::d2(0.6, 0.8)).unwrap());
        assert!(matches!(
            i.contains(&Point::d2(0.0, 0.0)),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn distance_examples() {
        let i = Domain::interval(-1.0, 1.0).unwrap();
        assert_eq!(i.boundary_distance(&Point::d1(0.25)).unwrap(), 0.75);
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.boundary_distance(&Point::d2(2.0, 0.0)).unwrap(), 1.0);

        // Brute force over a dense boundary sample.
        let r = Domain::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap();
        let p = Point::d2(1.0, 0.5);
        let brute = (0..60_000)
            .map(|k| r.boundary_point(k as f64 / 60_000.0).dist(&p))
            .fold(f64::INFINITY, f64::min);
        assert!((brute - 0.5).abs() < 1e-12);
        assert!((r.boundary_distance(&p).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn boundary_samples_have_zero_distance() {
        for d in shapes() {
            for k in 0..500 {
                let q = d.boundary_point(k as f64 / 500.0);
                assert!(d.boundary_distance(&q).unwrap() < 1e-12, "{d:?} {q:?}");
            }
        }
    }

    #[test]
    fn contained_points_are_off_boundary_and_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in shapes() {
            let (lo, hi) = d.bounding_box();
            let draw = |rng: &mut ChaCha8Rng| {
                let x = lo[0] - 1.0 + (hi[0] - lo[0] + 2.0) * rng.gen::<f64>();
                let y = lo[1] - 1.0 + (hi[1] - lo[1] + 2.0) * rng.gen::<f64>();
                if d.dim() == 1 {
                    Point::d1(x)
                } else {
                    Point::d2(x, y)
                }
            };
            for _ in 0..10_000 {
                let p = draw(&mut rng);
                let q = draw(&mut rng);
                let dp = d.boundary_distance(&p).unwrap();
                let dq = d.boundary_distance(&q).unwrap();
                if d.contains(&p).unwrap() {
                    assert!(dp > 0.0);
                }
                assert!((dp - dq).abs() <= p.dist(&q) + 1e-12);
            }
        }
    }

    #[test]
    fn ray_exit_lands_on_boundary() {
        for d in shapes() {
            let c = d.center();
            let dirs: Vec<Direction> = if d.dim() == 1 {
                vec![Direction::positive(), Direction::negative()]
            } else {
                (0..37).map(|k| Direction::from_angle(0.17 * k as f64)).collect()
            };
            for dir in dirs {
                let r = d.ray_exit(&c, &dir);
                assert!(d.boundary_distance(&c.along(&dir, r)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn chords_enter_and_leave() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let z = Point::d2(3.0, 0.0);
        let (r_in, len) = b.chord(&z, &Direction::from_angle(std::f64::consts::PI)).unwrap();
        assert!((r_in - 2.0).abs() < 1e-14 && (len - 2.0).abs() < 1e-14);
        assert!(b.chord(&z, &Direction::positive()).is_none());
        let r = Domain::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap();
        let (r_in, len) = r.chord(&Point::d2(-1.0, 0.5), &Direction::positive()).unwrap();
        assert!((r_in - 1.0).abs() < 1e-14 && (len - 2.0).abs() < 1e-14);
    }

    #[test]
    fn support_distance_examples() {
        let i = Domain::interval(-1.0, 1.0).unwrap();
        let neumann = RobinWeight::uniform(0.0).unwrap();
        let d = support_distance(&i, &neumann, &Point::d1(0.9), 0.5).unwrap();
        assert!((d - 0.1).abs() < 1e-15);

        let dirichlet = RobinWeight::uniform(1.0).unwrap();
        assert!(matches!(
            support_distance(&i, &dirichlet, &Point::d1(0.2), 0.5),
            Err(Error::EmptySupport { .. })
        ));

        let mixed = RobinWeight {
            regions: vec![WeightRegion {
                region: Region::HalfSpace { normal: vec![1.0], offset: 1.0 },
                value: 1.0,
            }],
            default: 0.0,
        };
        let d = support_distance(&i, &mixed, &Point::d1(0.5), 0.5).unwrap();
        assert!((d - 1.5).abs() < 1e-15);
    }

    #[test]
    fn marching_matches_uniform_distance_in_2d() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        // Right half-plane fully Dirichlet, left half Neumann.
        let w = RobinWeight {
            regions: vec![WeightRegion {
                region: Region::HalfSpace { normal: vec![1.0, 0.0], offset: 0.0 },
                value: 1.0,
            }],
            default: 0.0,
        };
        let p = Point::d2(0.5, 0.0);
        let d = support_distance(&b, &w, &p, 0.5).unwrap();
        // Nearest point of {x <= 0, |z| > 1} from (0.5, 0): (0, +-1).
        assert!((d - 0.5f64.hypot(1.0)).abs() < 5e-3, "{d}");
    }
}
