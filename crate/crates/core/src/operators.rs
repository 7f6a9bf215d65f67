//! The nonlocal operators: fractional Laplacian, regional fractional
//! Laplacian, mass integral, normalized nonlocal normal derivative, Robin
//! extension, and the fractional Laplacian of the weight.
//!
//! The fractional Laplacian at an interior `x` is split as
//!
//! ```text
//! D^s u(x) = c [ PV int_{B_rho(x)} + int_{Omega \ B_rho(x)} ] (u(x) - u(y)) K
//!          + c [ u(x) E(x) - int_{R^n \ Omega} u(y) K ],
//! ```
//!
//! with `K = |x - y|^{-n-2s}` and `E(x) = int_{R^n \ Omega} K`, known in
//! closed form on the interval and as a one-dimensional angular integral in
//! the plane. The first bracket is the regional operator.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use parking_lot::RwLock;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::field::{ExteriorRule, FieldRule, RobinWeight, ScalarField};
use crate::geometry::{Direction, Domain, Point};
use crate::quadrature::{
    integrate_angles, integrate_directions, integrate_over_domain_from, integrate_pieces, integrate_segments,
    oscillatory_power_tail, ring_principal_value, Map, Piece, QuadratureResult, QuadratureSpec, Segment, Tail,
};

/// Dimension, order and the normalizing constant of `D^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    pub n: usize,
    pub s: f64,
    pub c_ns: f64,
}

impl FractionalOrder {
    /// `c_{n,s} = 4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|)`, the constant
    /// for which `D^s` has Fourier symbol `|xi|^{2s}`.
    pub fn new(n: usize, s: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidParameter(format!("dimension {n} not supported")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParameter(format!("order s = {s} outside (0, 1)")));
        }
        let nh = n as f64 / 2.0;
        let c_ns = 4f64.powf(s) * gamma(nh + s) / (PI.powf(nh) * gamma(-s).abs());
        Ok(FractionalOrder { n, s, c_ns })
    }

    /// `n + 2s`
    pub fn exponent(&self) -> f64 {
        self.n as f64 + 2.0 * self.s
    }

    /// `r^{-n-2s}`
    pub fn kernel(&self, r: f64) -> f64 {
        r.powf(-self.exponent())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Left,
    Right,
}

/// `int_{r_in}^{r_in + len} r^{-1-2s} dr`, scaled by `ell^{2s}`.
fn chord_mass(r_in: f64, len: f64, ell: f64, s: f64) -> f64 {
    (r_in / ell).powf(-2.0 * s) * -(-2.0 * s * (len / r_in).ln_1p()).exp_m1() / (2.0 * s)
}

/// Exterior of an interval as `(lo, hi, beta)` pieces on which the weight
/// is constant. Infinite ends are kept as infinities.
pub(crate) fn exterior_pieces_1d(a: f64, b: f64, weight: &RobinWeight) -> Vec<(f64, f64, f64)> {
    let mut cuts = Vec::new();
    for r in &weight.regions {
        let (lo, hi) = r.region.interval_1d();
        cuts.extend([lo, hi].into_iter().filter(|v| v.is_finite() && (*v < a || *v > b)));
    }
    let mut out = Vec::new();
    for (lo0, hi0) in [(f64::NEG_INFINITY, a), (b, f64::INFINITY)] {
        let mut c: Vec<f64> = cuts.iter().copied().filter(|v| *v > lo0 && *v < hi0).collect();
        c.push(lo0);
        c.push(hi0);
        c.sort_by(f64::total_cmp);
        c.dedup();
        for w in c.windows(2) {
            let probe = match (w[0].is_finite(), w[1].is_finite()) {
                (true, true) => 0.5 * (w[0] + w[1]),
                (false, true) => w[1] - 1.0,
                _ => w[0] + 1.0,
            };
            out.push((w[0], w[1], weight.value(&Point::d1(probe))));
        }
    }
    out
}

/// Operator evaluator bound to one domain, order and quadrature spec.
///
/// The planar mass integral is memoized on exact node positions behind a
/// lock, so one evaluator can be shared across threads.
pub struct Operators {
    domain: Domain,
    order: FractionalOrder,
    spec: QuadratureSpec,
    mass_cache: RwLock<HashMap<[u64; 2], f64>>,
}

impl std::fmt::Debug for Operators {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Operators")
            .field("domain", &self.domain)
            .field("order", &self.order)
            .field("spec", &self.spec)
            .finish()
    }
}

/// Offset along an exterior ray, with enough context to place it exactly.
#[derive(Debug, Clone, Copy)]
struct RayPoint<'p> {
    x: &'p Point,
    dir: Direction,
    r_exit: f64,
    t: f64,
}

enum RayTail {
    Algebraic(f64),
    Oscillatory { amplitude: f64, k: [f64; 2], phase: f64 },
}

/// Exterior values of one field, memoized per node for the duration of a
/// single operator evaluation.
struct ExteriorValues<'a> {
    ops: &'a Operators,
    rule: &'a FieldRule,
    ext: &'a ExteriorRule,
    cache: RefCell<HashMap<[u64; 2], f64>>,
}

impl ExteriorValues<'_> {
    fn at(&self, p: RayPoint<'_>) -> Result<f64> {
        let ops = self.ops;
        match self.ext {
            ExteriorRule::Zero => Ok(0.0),
            ExteriorRule::Explicit => Ok(self.rule.eval(&ops.ray_point(&p))),
            ExteriorRule::RobinExtension { weight } => {
                if let Domain::Interval { a, b } = ops.domain {
                    let (side, z) = if p.dir.0[0] > 0.0 {
                        (Side::Right, Point::d1(b + p.t))
                    } else {
                        (Side::Left, Point::d1(a - p.t))
                    };
                    let beta = weight.value(&z);
                    if beta >= 1.0 {
                        return Ok(0.0);
                    }
                    let key = [side as u64, p.t.to_bits()];
                    if let Some(v) = self.cache.borrow().get(&key) {
                        return Ok((1.0 - beta) * v);
                    }
                    let v = ops.average_1d(self.rule, side, p.t)?;
                    self.cache.borrow_mut().insert(key, v);
                    return Ok((1.0 - beta) * v);
                }
                let mut t = p.t.max(1e-12 * ops.domain.diameter());
                let mut z = p.x.along(&p.dir, p.r_exit + t);
                while !ops.domain.is_exterior(&z)? {
                    t *= 2.0;
                    z = p.x.along(&p.dir, p.r_exit + t);
                }
                let beta = weight.value(&z);
                if beta >= 1.0 {
                    return Ok(0.0);
                }
                if let Some(v) = self.cache.borrow().get(&z.key()) {
                    return Ok((1.0 - beta) * v);
                }
                let v = ops.average_2d(self.rule, &z)?;
                self.cache.borrow_mut().insert(z.key(), v);
                Ok((1.0 - beta) * v)
            }
        }
    }
}

impl Operators {
    pub fn new(domain: Domain, s: f64, spec: QuadratureSpec) -> Result<Self> {
        domain.validate()?;
        spec.validate()?;
        let order = FractionalOrder::new(domain.dim(), s)?;
        Ok(Operators {
            domain,
            order,
            spec,
            mass_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn order(&self) -> &FractionalOrder {
        &self.order
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// Same domain and order with another spec (and a fresh cache).
    pub fn with_spec(&self, spec: QuadratureSpec) -> Result<Self> {
        Operators::new(self.domain.clone(), self.order.s, spec)
    }

    fn s(&self) -> f64 {
        self.order.s
    }

    /// `dist(x, boundary)` for an interior `x`, or a geometry error.
    pub(crate) fn require_interior(&self, x: &Point) -> Result<f64> {
        if !self.domain.contains(x)? {
            return Err(Error::Geometry(format!("point {:?} is not in the domain", x.coords())));
        }
        Ok(self.domain.boundary_distance_unchecked(x))
    }

    /// `dist(z, domain)` for `z` outside the closure, or a geometry error.
    pub(crate) fn require_exterior(&self, z: &Point) -> Result<f64> {
        if !self.domain.is_exterior(z)? {
            return Err(Error::Geometry(format!(
                "point {:?} lies in the closed domain; the mass integral diverges there",
                z.coords()
            )));
        }
        Ok(self.domain.boundary_distance_unchecked(z))
    }

    fn side_1d(&self, z: &Point) -> Side {
        if z.x() > self.domain.center().x() {
            Side::Right
        } else {
            Side::Left
        }
    }

    fn ray_point(&self, p: &RayPoint<'_>) -> Point {
        match self.domain {
            Domain::Interval { a, b } => Point::d1(if p.dir.0[0] > 0.0 { b + p.t } else { a - p.t }),
            _ => p.x.along(&p.dir, p.r_exit + p.t),
        }
    }

    /// `M(z) = int_Omega |z - w|^{-n-2s} dw` for `z` outside the closure.
    pub fn mass_integral(&self, z: &Point) -> Result<f64> {
        let d = self.require_exterior(z)?;
        match self.domain {
            Domain::Interval { a, b } => Ok(self.mass_1d(d, b - a)),
            _ => {
                let ell = z.dist(&self.domain.center());
                Ok(self.scaled_mass_2d(z)? * ell.powf(-2.0 * self.s()))
            }
        }
    }

    /// `ell^{2s} M(z)` with `ell = |z - center|`, memoized. The scaling keeps
    /// far-field values in range.
    pub(crate) fn scaled_mass_2d(&self, z: &Point) -> Result<f64> {
        if let Some(m) = self.mass_cache.read().get(&z.key()) {
            return Ok(*m);
        }
        let ell = z.dist(&self.domain.center());
        let m = self.mass_2d_scaled(z, ell)?;
        self.mass_cache.write().insert(z.key(), m);
        Ok(m)
    }

    /// Interval mass at distance `d` from an interval of length `len`.
    pub(crate) fn mass_1d(&self, d: f64, len: f64) -> f64 {
        chord_mass(d, len, 1.0, self.s())
    }

    /// `d^{2s}` times the interval mass at distance `d`.
    pub(crate) fn scaled_mass_1d(&self, d: f64, len: f64) -> f64 {
        chord_mass(d, len, d, self.s())
    }

    /// `ell^{2s} M(z)` by angular integration of closed-form chord masses.
    fn mass_2d_scaled(&self, z: &Point, ell: f64) -> Result<f64> {
        let s = self.s();
        let (lo, hi, breaks) = self.domain.visible_cone(z);
        let r = integrate_angles(
            |th| {
                Ok(self
                    .domain
                    .chord(z, &Direction::from_angle(th))
                    .map_or(0.0, |(r_in, len)| chord_mass(r_in, len, ell, s)))
            },
            lo,
            hi,
            &breaks,
            true,
            &self.spec.inner(),
        )?;
        Ok(r.value)
    }

    /// `M(z)^{-1} int_Omega u(y) |z - y|^{-n-2s} dy`.
    pub fn weighted_average(&self, rule: &FieldRule, z: &Point) -> Result<f64> {
        let d = self.require_exterior(z)?;
        match self.domain {
            Domain::Interval { .. } => self.average_1d(rule, self.side_1d(z), d),
            _ => self.average_2d(rule, z),
        }
    }

    /// Weighted average at distance `d` beyond one end of the interval. The
    /// integral runs over the distance `t` from the exterior point, with
    /// kernel normalized by `d` so that neither tiny nor huge `d` loses range.
    pub(crate) fn average_1d(&self, rule: &FieldRule, side: Side, d: f64) -> Result<f64> {
        self.average_1d_of(&|p| rule.eval(p), side, d)
    }

    fn average_1d_of(&self, g: &dyn Fn(&Point) -> f64, side: Side, d: f64) -> Result<f64> {
        let Domain::Interval { a, b } = self.domain else {
            unreachable!("interval-only helper")
        };
        let s = self.s();
        let len = b - a;
        let piece = [Piece { map: Map::ExpAbove { origin: 0.0 }, lo: d.ln(), hi: (d + len).ln() }];
        let num = integrate_pieces(
            |t| {
                let y = match side {
                    Side::Right => b - (t - d),
                    Side::Left => a + (t - d),
                };
                Ok(g(&Point::d1(y)) * (t / d).powf(-1.0 - 2.0 * s) / d)
            },
            &piece,
            &self.spec.inner(),
        )?;
        Ok(num.value / chord_mass(d, len, d, s))
    }

    pub(crate) fn average_2d(&self, rule: &FieldRule, z: &Point) -> Result<f64> {
        self.average_2d_of(&|p| rule.eval(p), z)
    }

    fn average_2d_of(&self, g: &dyn Fn(&Point) -> f64, z: &Point) -> Result<f64> {
        let s = self.s();
        let ell = z.dist(&self.domain.center());
        let inner = self.spec.inner();
        let (lo, hi, breaks) = self.domain.visible_cone(z);
        let num = integrate_angles(
            |th| {
                let dir = Direction::from_angle(th);
                let Some((r_in, len)) = self.domain.chord(z, &dir) else {
                    return Ok(0.0);
                };
                if !(r_in > 0.0) || !(len > 0.0) {
                    return Ok(0.0);
                }
                let piece = [Piece { map: Map::ExpAbove { origin: 0.0 }, lo: r_in.ln(), hi: (r_in + len).ln() }];
                let r = integrate_pieces(
                    |r| Ok(g(&z.along(&dir, r)) * (r / ell).powf(-1.0 - 2.0 * s) / ell),
                    &piece,
                    &inner,
                )?;
                Ok(r.value)
            },
            lo,
            hi,
            &breaks,
            true,
            &inner,
        )?;
        Ok(num.value / self.scaled_mass_2d(z)?)
    }

    /// `M(z)^{-1} int_Omega g(y) |z - y|^{-n-2s} dy` for any bounded `g`.
    pub fn weighted_average_of(&self, g: &dyn Fn(&Point) -> f64, z: &Point) -> Result<f64> {
        let d = self.require_exterior(z)?;
        match self.domain {
            Domain::Interval { .. } => self.average_1d_of(g, self.side_1d(z), d),
            _ => self.average_2d_of(g, z),
        }
    }

    /// `(1 - beta(z)) M(z)^{-1} int_Omega u(y) |z - y|^{-n-2s} dy`: the
    /// exterior value making `beta u + (1 - beta) N_s u = 0` hold at `z`.
    pub fn robin_extension(&self, rule: &FieldRule, weight: &RobinWeight, z: &Point) -> Result<f64> {
        self.require_exterior(z)?;
        let beta = weight.value(z);
        if beta >= 1.0 {
            return Ok(0.0);
        }
        Ok((1.0 - beta) * self.weighted_average(rule, z)?)
    }

    /// Value of a field outside the domain according to its exterior rule.
    pub fn exterior_value(&self, field: &ScalarField, z: &Point) -> Result<f64> {
        match field.exterior.as_ref().ok_or_else(missing_exterior)? {
            ExteriorRule::Explicit => Ok(field.rule.eval(z)),
            ExteriorRule::Zero => Ok(0.0),
            ExteriorRule::RobinExtension { weight } => self.robin_extension(&field.rule, weight, z),
        }
    }

    /// Normalized nonlocal normal derivative
    /// `N_s u(z) = u(z) - M(z)^{-1} int_Omega u(y) |z - y|^{-n-2s} dy`.
    pub fn nonlocal_normal_derivative(&self, field: &ScalarField, z: &Point) -> Result<f64> {
        self.require_exterior(z)?;
        Ok(self.exterior_value(field, z)? - self.weighted_average(&field.rule, z)?)
    }

    /// `E(x) = int_{R^n \ Omega} |x - y|^{-n-2s} dy`.
    pub fn exterior_mass(&self, x: &Point) -> Result<QuadratureResult> {
        self.require_interior(x)?;
        let s = self.s();
        match self.domain {
            Domain::Interval { a, b } => Ok(QuadratureResult::exact(
                ((b - x.x()).powf(-2.0 * s) + (x.x() - a).powf(-2.0 * s)) / (2.0 * s),
            )),
            _ => integrate_angles(
                |th| Ok(self.domain.ray_exit(x, &Direction::from_angle(th)).powf(-2.0 * s) / (2.0 * s)),
                0.0,
                TAU,
                &self.domain.corner_angles(x),
                false,
                &self.spec,
            ),
        }
    }

    /// `PV int_Omega (u(x) - u(y)) |x - y|^{-n-2s} dy`, without `c_{n,s}`.
    pub(crate) fn regional_integral(&self, rule: &FieldRule, x: &Point) -> Result<QuadratureResult> {
        let d = self.require_interior(x)?;
        let s = self.s();
        let rho = self.spec.ring_for(d)?;
        let ux = rule.eval(x);
        let inner = self.spec.inner();
        let ring = match self.domain {
            Domain::Interval { .. } => ring_principal_value(
                |h| Ok(2.0 * ux - rule.eval(&Point::d1(x.x() + h)) - rule.eval(&Point::d1(x.x() - h))),
                |_| Ok(0.0),
                rho,
                s,
                &self.spec,
            )?,
            _ => ring_principal_value(
                |h| {
                    let r = integrate_angles(
                        |th| {
                            let e = Direction::from_angle(th);
                            Ok(2.0 * ux - rule.eval(&x.along(&e, h)) - rule.eval(&x.along(&e, -h)))
                        },
                        0.0,
                        PI,
                        &[],
                        false,
                        &inner,
                    )?;
                    Ok(r.value)
                },
                |_| Ok(0.0),
                rho,
                s,
                &self.spec,
            )?,
        };
        let outer = integrate_over_domain_from(
            |y| Ok((ux - rule.eval(y)) * self.order.kernel(x.dist(y))),
            &self.domain,
            x,
            rho,
            &self.spec,
        )?;
        Ok(ring + outer)
    }

    /// Regional fractional Laplacian `c PV int_Omega (u(x) - u(y)) K dy`.
    pub fn regional_laplacian(&self, rule: &FieldRule, x: &Point) -> Result<QuadratureResult> {
        Ok(self.regional_integral(rule, x)?.scale(self.order.c_ns))
    }

    fn ray_tail(&self, rule: &FieldRule, ext: &ExteriorRule) -> Result<RayTail> {
        let n = self.order.n as f64;
        let base = 1.0 + 2.0 * self.s();
        match (ext, rule) {
            (ExteriorRule::Explicit, FieldRule::Trigonometric { amplitude, wavevector, phase }) => {
                let mut k = [0.0; 2];
                k[..wavevector.len()].copy_from_slice(wavevector);
                Ok(RayTail::Oscillatory { amplitude: *amplitude, k, phase: *phase })
            }
            (ExteriorRule::Explicit, FieldRule::Polynomial { .. }) => {
                let deg = rule.degree().unwrap_or(0) as f64;
                let q = base - deg;
                if q <= 1.0 {
                    return Err(Error::Divergent { decay: n + 2.0 * self.s() - deg, dim: self.order.n });
                }
                Ok(RayTail::Algebraic(q))
            }
            _ => Ok(RayTail::Algebraic(base)),
        }
    }

    /// `int_{R^n \ Omega} u(y) |x - y|^{-n-2s} dy` along rays from `x`.
    fn exterior_field_integral(&self, field: &ScalarField, x: &Point) -> Result<QuadratureResult> {
        let ext = field.exterior.as_ref().ok_or_else(missing_exterior)?;
        match ext {
            ExteriorRule::Zero => return Ok(QuadratureResult::default()),
            ExteriorRule::RobinExtension { weight } if weight.is_identically(1.0) => {
                return Ok(QuadratureResult::default())
            }
            _ => {}
        }
        let tail = self.ray_tail(&field.rule, ext)?;
        let values = ExteriorValues { ops: self, rule: &field.rule, ext, cache: RefCell::new(HashMap::new()) };
        let s = self.s();
        let scale = self.spec.tail_factor * self.domain.diameter();
        let inner = if self.order.n == 1 { self.spec.clone() } else { self.spec.inner() };
        integrate_directions(
            &self.domain,
            x,
            |dir| {
                let r_exit = self.domain.ray_exit(x, &dir);
                let g = |t: f64| {
                    let v = values.at(RayPoint { x, dir, r_exit, t })?;
                    Ok(v * (r_exit + t).powf(-1.0 - 2.0 * s))
                };
                match tail {
                    RayTail::Algebraic(q) => {
                        integrate_segments(g, &[Segment::half_line(scale, Tail::Algebraic(q))], &inner)
                    }
                    RayTail::Oscillatory { amplitude, k, phase } => {
                        let near = integrate_segments(g, &[Segment::half_line(scale, Tail::Truncate)], &inner)?;
                        let omega = dir.dot(k);
                        let phi = k[0] * x.x() + k[1] * x.y() + phase;
                        let far = oscillatory_power_tail(omega, phi, r_exit + scale, 1.0 + 2.0 * s, &inner)?;
                        Ok(near + far.scale(amplitude))
                    }
                }
            },
            &self.spec,
        )
    }

    /// `c int_{R^n \ Omega} (u(x) - u(y)) |x - y|^{-n-2s} dy`, the part of
    /// the fractional Laplacian contributed by exterior values.
    pub fn exterior_contribution(&self, field: &ScalarField, x: &Point) -> Result<QuadratureResult> {
        self.require_interior(x)?;
        let ux = field.rule.eval(x);
        let e = self.exterior_mass(x)?;
        let j = self.exterior_field_integral(field, x)?;
        Ok((e.scale(ux) - j).scale(self.order.c_ns))
    }

    /// `D^s u(x) = c PV int_{R^n} (u(x) - u(y)) |x - y|^{-n-2s} dy`, with
    /// exterior values taken from the field's exterior rule.
    pub fn fractional_laplacian(&self, field: &ScalarField, x: &Point) -> Result<QuadratureResult> {
        if field.exterior.is_none() {
            return Err(missing_exterior());
        }
        let regional = self.regional_laplacian(&field.rule, x)?;
        Ok(regional + self.exterior_contribution(field, x)?)
    }

    /// `D^s beta(x) = -c int_{R^n \ Omega} beta(y) |x - y|^{-n-2s} dy` for an
    /// interior `x` (the weight vanishes on the domain).
    pub fn weight_laplacian_term(&self, weight: &RobinWeight, x: &Point) -> Result<QuadratureResult> {
        self.require_interior(x)?;
        let s = self.s();
        let c = self.order.c_ns;
        if let Some(v) = weight.as_uniform() {
            if v == 0.0 {
                return Ok(QuadratureResult::default());
            }
            return Ok(self.exterior_mass(x)?.scale(-c * v));
        }
        if let Domain::Interval { a, b } = self.domain {
            // Exact: the weight is piecewise constant on exterior intervals.
            let xx = x.x();
            let tail = |near: f64, far: f64| (near.powf(-2.0 * s) - far.powf(-2.0 * s)) / (2.0 * s);
            let total: f64 = exterior_pieces_1d(a, b, weight)
                .into_iter()
                .map(|(lo, hi, beta)| {
                    if hi <= a {
                        beta * tail(xx - hi, xx - lo)
                    } else {
                        beta * tail(lo - xx, hi - xx)
                    }
                })
                .sum();
            return Ok(QuadratureResult::exact(-c * total));
        }
        let scale = self.spec.tail_factor * self.domain.diameter();
        let inner = self.spec.inner();
        let r = integrate_directions(
            &self.domain,
            x,
            |dir| {
                let r_exit = self.domain.ray_exit(x, &dir);
                integrate_segments(
                    |t| {
                        let r = r_exit + t;
                        Ok(weight.value(&x.along(&dir, r)) * r.powf(-1.0 - 2.0 * s))
                    },
                    &[Segment::half_line(scale, Tail::Algebraic(1.0 + 2.0 * s))],
                    &inner,
                )
            },
            &self.spec,
        )?;
        Ok(r.scale(-c))
    }
}

fn missing_exterior() -> Error {
    Error::InvalidParameter("field has no exterior rule; the operator needs values outside the domain".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Region, WeightRegion};
    use crate::quadrature::integrate_exterior;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn interval_ops(s: f64) -> Operators {
        Operators::new(Domain::interval(-1.0, 1.0).unwrap(), s, QuadratureSpec::default()).unwrap()
    }

    fn disc_ops(s: f64) -> Operators {
        Operators::new(Domain::ball([0.0, 0.0], 1.0).unwrap(), s, QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn gamma_and_constants() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-12);
        assert!((gamma(1.0) - 1.0).abs() < 1e-12);
        let c = FractionalOrder::new(1, 0.5).unwrap().c_ns;
        assert!((c - 1.0 / PI).abs() < 1e-13);
        let c2 = FractionalOrder::new(2, 0.5).unwrap().c_ns;
        assert!((c2 - 0.5 / PI).abs() < 1e-13);
        assert!(FractionalOrder::new(1, 1.0).is_err());
        assert!(FractionalOrder::new(3, 0.5).is_err());
    }

    #[test]
    fn mass_examples() {
        let ops = interval_ops(0.5);
        assert!((ops.mass_integral(&Point::d1(2.0)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((ops.mass_integral(&Point::d1(100.0)).unwrap() - 2.0 / 9999.0).abs() < 1e-18);
        assert!((ops.mass_integral(&Point::d1(-2.0)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(ops.mass_integral(&Point::d1(1.0)), Err(Error::Geometry(_))));
        assert!(matches!(ops.mass_integral(&Point::d1(0.0)), Err(Error::Geometry(_))));
    }

    #[test]
    fn planar_mass_is_rotation_invariant_and_matches_direct_quadrature() {
        let ops = disc_ops(0.5);
        let z = Point::d2(1.7, 0.0);
        let m = ops.mass_integral(&z).unwrap();
        for th in [0.3, 1.9, 4.0] {
            let zr = Point::d2(1.7 * f64::cos(th), 1.7 * f64::sin(th));
            let mr = ops.mass_integral(&zr).unwrap();
            assert!((m - mr).abs() < 1e-9 * m, "{m} vs {mr}");
        }
        let direct = crate::quadrature::integrate_over_domain(
            |w| Ok(z.dist(w).powi(-3)),
            ops.domain(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((m - direct.value).abs() < 1e-7 * m, "{m} vs {direct:?}");
    }

    #[test]
    fn fractional_laplacian_examples() {
        let ops = interval_ops(0.5);
        let seven = ScalarField::explicit(FieldRule::constant(7.0));
        let v = ops.fractional_laplacian(&seven, &Point::d1(0.3)).unwrap();
        assert!(v.value.abs() < 1e-9, "{v:?}");
        for s in [0.25, 0.5, 0.75] {
            let ops = interval_ops(s);
            let cos = ScalarField::explicit(FieldRule::cos1d(1.0));
            for x in [0.0, 0.3] {
                let v = ops.fractional_laplacian(&cos, &Point::d1(x)).unwrap();
                assert!((v.value - f64::cos(x)).abs() < 1e-6, "s={s} x={x}: {v:?}");
            }
        }
    }

    #[test]
    fn torsion_function() {
        for s in [0.25, 0.5, 0.75] {
            let ops = interval_ops(s);
            let bump = FieldRule::PowerBump { center: vec![0.0], radius: 1.0, exponent: s };
            let field = ScalarField { rule: bump, exterior: Some(ExteriorRule::Zero) };
            let exact = 4f64.powf(s) * gamma(1.0 + s) * gamma(0.5 + s) / gamma(0.5);
            for x in [0.0, 0.4] {
                let v = ops.fractional_laplacian(&field, &Point::d1(x)).unwrap();
                assert!((v.value - exact).abs() < 1e-6, "s={s} x={x}: {} vs {exact}", v.value);
            }
        }
    }

    #[test]
    fn regional_examples() {
        let ops = interval_ops(0.5);
        let one = ops.regional_laplacian(&FieldRule::constant(1.0), &Point::d1(0.2)).unwrap();
        assert_eq!(one.value, 0.0);
        let odd = ops.regional_laplacian(&FieldRule::poly1d(&[0.0, 1.0]), &Point::d1(0.0)).unwrap();
        assert!(odd.value.abs() < 1e-12);
        let sq = ops.regional_laplacian(&FieldRule::poly1d(&[0.0, 0.0, 1.0]), &Point::d1(0.0)).unwrap();
        assert!((sq.value + 2.0 / PI).abs() < 1e-9, "{sq:?}");
        assert!(ops.regional_laplacian(&FieldRule::constant(1.0), &Point::d1(1.5)).is_err());
    }

    #[test]
    fn averages_and_normal_derivative() {
        let ops = interval_ops(0.5);
        let y = FieldRule::poly1d(&[0.0, 1.0]);
        let expected = (4.0 / 3.0 - 3f64.ln()) * 1.5;
        let z = Point::d1(2.0);
        assert!((ops.weighted_average(&y, &z).unwrap() - expected).abs() < 1e-12);
        let nb = RobinWeight::neumann();
        assert!((ops.robin_extension(&y, &nb, &z).unwrap() - expected).abs() < 1e-12);
        assert_eq!(ops.robin_extension(&y, &RobinWeight::dirichlet(), &z).unwrap(), 0.0);
        let five = FieldRule::constant(5.0);
        assert!((ops.robin_extension(&five, &nb, &Point::d1(-3.0)).unwrap() - 5.0).abs() < 1e-12);
        let c = ScalarField::explicit(FieldRule::constant(2.5));
        assert!(ops.nonlocal_normal_derivative(&c, &z).unwrap().abs() < 1e-12);
        let robin = ScalarField::neumann(y.clone());
        assert!(ops.nonlocal_normal_derivative(&robin, &Point::d1(1.01)).unwrap().abs() < 1e-12);
        assert!(ops.nonlocal_normal_derivative(&ScalarField::interior_only(y), &z).is_err());
    }

    #[test]
    fn robin_condition_holds_at_random_exterior_points() {
        let ops = interval_ops(0.4);
        let weight = RobinWeight {
            regions: vec![WeightRegion { region: Region::HalfSpace { normal: vec![1.0], offset: 1.5 }, value: 0.7 }],
            default: 0.2,
        };
        let field = ScalarField::robin(FieldRule::poly1d(&[0.3, -1.0, 2.0]), weight.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mag = 1.0 + 10f64.powf(rng.gen_range(-4.0..2.0));
            let z = Point::d1(if rng.gen::<bool>() { mag } else { -mag });
            let u = ops.exterior_value(&field, &z).unwrap();
            let nd = ops.nonlocal_normal_derivative(&field, &z).unwrap();
            let beta = weight.value(&z);
            assert!((beta * u + (1.0 - beta) * nd).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_term_examples() {
        let ops = interval_ops(0.5);
        let x = Point::d1(0.0);
        assert_eq!(ops.weight_laplacian_term(&RobinWeight::neumann(), &x).unwrap().value, 0.0);
        let v = ops.weight_laplacian_term(&RobinWeight::dirichlet(), &x).unwrap();
        assert!((v.value + 2.0 / PI).abs() < 1e-14);
        // Region form of the same weight agrees with the uniform shortcut.
        let split = RobinWeight {
            regions: vec![WeightRegion { region: Region::HalfSpace { normal: vec![1.0], offset: 3.0 }, value: 1.0 }],
            default: 1.0,
        };
        let w = ops.weight_laplacian_term(&split, &Point::d1(0.25)).unwrap();
        let u = ops.weight_laplacian_term(&RobinWeight::dirichlet(), &Point::d1(0.25)).unwrap();
        assert!((w.value - u.value).abs() < 1e-14);
    }

    #[test]
    fn weight_term_blows_up_like_distance_power() {
        for s in [0.25, 0.5, 0.75] {
            let ops = interval_ops(s);
            let one_sided = RobinWeight::one_sided(vec![1.0], 1.0);
            let f = |d: f64| ops.weight_laplacian_term(&one_sided, &Point::d1(1.0 - d)).unwrap().value.abs().ln();
            let slope = (f(1e-4) - f(1e-3)) / (1e-4f64.ln() - 1e-3f64.ln());
            assert!((slope + 2.0 * s).abs() < 1e-2, "s={s}: slope {slope}");
        }
    }

    #[test]
    fn planar_weight_term_matches_uniform_shortcut() {
        let ops = disc_ops(0.5);
        let x = Point::d2(0.2, -0.1);
        let half = RobinWeight {
            regions: vec![WeightRegion { region: Region::HalfSpace { normal: vec![1.0, 0.0], offset: 0.0 }, value: 1.0 }],
            default: 1.0,
        };
        let a = ops.weight_laplacian_term(&half, &x).unwrap();
        let b = ops.weight_laplacian_term(&RobinWeight::dirichlet(), &x).unwrap();
        assert!((a.value - b.value).abs() < 1e-7 * b.value.abs(), "{a:?} {b:?}");
    }

    #[test]
    fn decomposition_against_independent_exterior_quadrature() {
        let ops = interval_ops(0.6);
        let field = ScalarField::neumann(FieldRule::poly1d(&[0.1, 0.5, -1.0]));
        let x = Point::d1(0.35);
        let full = ops.fractional_laplacian(&field, &x).unwrap();
        let regional = ops.regional_laplacian(&field.rule, &x).unwrap();
        let ux = field.rule.eval(&x);
        let ext = integrate_exterior(
            |y| Ok((ux - ops.exterior_value(&field, y)?) * ops.order().kernel(x.dist(y))),
            ops.order().exponent(),
            ops.domain(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        let lhs = full.value;
        let rhs = regional.value + ops.order().c_ns * ext.value;
        let tol = 10.0 * (full.error + regional.error + ext.error) + 1e-8;
        assert!((lhs - rhs).abs() < tol, "{lhs} vs {rhs} (tol {tol})");
    }

    #[test]
    fn regional_commutes_with_rotations_on_disc() {
        let ops = disc_ops(0.5);
        let rule = FieldRule::Polynomial {
            terms: vec![
                crate::field::Monomial { coef: 1.0, powers: vec![2, 0] },
                crate::field::Monomial { coef: 1.0, powers: vec![0, 2] },
            ],
        };
        let a = ops.regional_laplacian(&rule, &Point::d2(0.4, 0.0)).unwrap();
        let b = ops.regional_laplacian(&rule, &Point::d2(0.4 * 0.6, 0.4 * 0.8)).unwrap();
        assert!((a.value - b.value).abs() < 1e-6 * a.value.abs().max(1.0), "{a:?} {b:?}");
    }

    #[test]
    fn planar_cos_symbol() {
        // D^s cos(k . y) = |k|^{2s} cos(k . y) for explicit exterior values.
        let ops = disc_ops(0.5);
        let f = ScalarField::explicit(FieldRule::Trigonometric { amplitude: 1.0, wavevector: vec![1.0, 0.0], phase: 0.0 });
        let v = ops.fractional_laplacian(&f, &Point::d2(0.0, 0.0)).unwrap();
        assert!((v.value - 1.0).abs() < 1e-5, "{v:?}");
    }
}
