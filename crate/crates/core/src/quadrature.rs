//! Adaptive quadrature for the three integral species that occur here:
//! proper integrals over the domain, improper integrals over its exterior,
//! and principal values at an interior singularity.
//!
//! Everything reduces to one engine: globally adaptive 15-point
//! Gauss-Kronrod bisection over a list of parameter intervals, each carrying
//! a change of variables. Two maps do the heavy lifting:
//!
//! - exponential maps `x = origin +- e^tau` put every length scale near an
//!   endpoint on an equal footing, which makes logarithmic and algebraic
//!   endpoint behaviour smooth in `tau` (geometric refinement toward the
//!   endpoint, in effect);
//! - the power tail `x = start * w^{-1/(q-1)}` maps `[start, inf)` onto
//!   `(0, 1]` so that an integrand decaying like `x^{-q}` becomes constant to
//!   leading order, integrating the algebraic tail exactly rather than
//!   truncating it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Direction, Domain, Point};

/// Tolerances and geometric knobs shared by every integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Principal-value ring radius as a fraction of `dist(x, boundary)`.
    pub ring_fraction: f64,
    /// Explicit ring radius; overrides `ring_fraction` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring_radius: Option<f64>,
    /// Exterior rays switch to the analytic tail map after
    /// `tail_factor * diameter` past the boundary.
    pub tail_factor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_subdivisions: 1 << 16,
            ring_fraction: 0.5,
            ring_radius: None,
            tail_factor: 10.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_subdivisions > 0
            && self.ring_fraction > 0.0
            && self.ring_fraction < 1.0
            && self.tail_factor > 0.0
            && self.ring_radius.map_or(true, |r| r > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid quadrature spec {self:?}")))
        }
    }

    /// Same spec with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureSpec {
            rel_tol: (self.rel_tol / factor).max(1e-14),
            abs_tol: (self.abs_tol / factor).max(1e-300),
            ..self.clone()
        }
    }

    /// Spec for integrals nested inside another one.
    pub fn inner(&self) -> Self {
        self.tightened(10.0)
    }

    /// Ring radius for a singularity at distance `d` from the boundary.
    pub fn ring_for(&self, d: f64) -> Result<f64> {
        let rho = self.ring_radius.unwrap_or(self.ring_fraction * d);
        if rho <= 0.0 || rho >= d {
            return Err(Error::Geometry(format!(
                "ring radius {rho} must lie in (0, dist to boundary = {d})"
            )));
        }
        Ok(rho)
    }
}

/// Value, error estimate, and work of one integral.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        QuadratureResult { value, error: 0.0, subdivisions: 0 }
    }

    pub fn scale(self, k: f64) -> Self {
        QuadratureResult {
            value: k * self.value,
            error: k.abs() * self.error,
            subdivisions: self.subdivisions,
        }
    }
}

impl std::ops::Add for QuadratureResult {
    type Output = QuadratureResult;
    fn add(self, o: Self) -> Self {
        QuadratureResult {
            value: self.value + o.value,
            error: self.error + o.error,
            subdivisions: self.subdivisions + o.subdivisions,
        }
    }
}

impl std::ops::Sub for QuadratureResult {
    type Output = QuadratureResult;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-1.0)
    }
}

impl std::iter::Sum for QuadratureResult {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(QuadratureResult::default(), |a, b| a + b)
    }
}

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Change of variables applied to a parameter interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Map {
    Linear,
    /// `x = origin + e^tau`
    ExpAbove { origin: f64 },
    /// `x = origin - e^tau`
    ExpBelow { origin: f64 },
    /// `x = start * w^{-1/(q-1)}` for `w` in `(0, 1]`.
    PowerTail { start: f64, q: f64 },
}

impl Map {
    #[inline]
    fn apply(&self, t: f64) -> (f64, f64) {
        match *self {
            Map::Linear => (t, 1.0),
            Map::ExpAbove { origin } => {
                let e = t.exp();
                (origin + e, e)
            }
            Map::ExpBelow { origin } => {
                let e = t.exp();
                (origin - e, e)
            }
            Map::PowerTail { start, q } => {
                let k = 1.0 / (q - 1.0);
                let x = start * t.powf(-k);
                (x, start * k * t.powf(-k - 1.0))
            }
        }
    }
}

/// Parameter interval `[lo, hi]` together with its map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub map: Map,
    pub lo: f64,
    pub hi: f64,
}

struct Cell {
    piece: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error
            .total_cmp(&o.error)
            .then(o.piece.cmp(&self.piece))
            .then(o.lo.total_cmp(&self.lo))
    }
}

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, map: &Map, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut fv = [0.0f64; 15];
    for (k, xk) in XGK.iter().enumerate() {
        let nodes: &[f64] = if k == 7 { &[0.0] } else { &[-1.0, 1.0] };
        for (j, sgn) in nodes.iter().enumerate() {
            let t = mid + sgn * half * xk;
            let (x, jac) = map.apply(t);
            let v = if !x.is_finite() || !jac.is_finite() || jac == 0.0 {
                0.0
            } else {
                let fx = f(x)?;
                if !fx.is_finite() {
                    return Err(Error::NonFinite { at: x });
                }
                fx * jac
            };
            fv[if k == 7 { 14 } else { 2 * k + j }] = v;
        }
    }
    let centre = fv[14];
    let mut resk = WGK[7] * centre;
    let mut resg = WG[3] * centre;
    let mut resabs = resk.abs();
    for k in 0..7 {
        let s = fv[2 * k] + fv[2 * k + 1];
        resk += WGK[k] * s;
        resabs += WGK[k] * (fv[2 * k].abs() + fv[2 * k + 1].abs());
        if k % 2 == 1 {
            resg += WG[k / 2] * s;
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (centre - mean).abs();
    for k in 0..7 {
        resasc += WGK[k] * ((fv[2 * k] - mean).abs() + (fv[2 * k + 1] - mean).abs());
    }
    let (resk, resabs, resasc) = (resk * half, resabs * half.abs(), resasc * half.abs());
    let mut err = ((resk - resg * half) as f64).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((resk, err))
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Globally adaptive Gauss-Kronrod over mapped pieces.
///
/// The cell with the largest error estimate is bisected until the summed
/// estimate meets `max(abs_tol, rel_tol * |value|)`. Cells too narrow to
/// split are frozen; their error stays in the reported estimate. The
/// result is deterministic for a fixed integrand and spec.
pub fn integrate_pieces<F>(mut f: F, pieces: &[Piece], spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for (i, p) in pieces.iter().enumerate() {
        if p.hi <= p.lo {
            continue;
        }
        let (value, error) = gk15(&mut f, &p.map, p.lo, p.hi)?;
        total += value;
        total_err += error;
        heap.push(Cell { piece: i, lo: p.lo, hi: p.hi, value, error });
    }
    let mut splits = 0usize;
    while total_err > spec.abs_tol.max(spec.rel_tol * total.abs()) {
        let Some(cell) = heap.pop() else { break };
        let width_floor = 64.0 * f64::EPSILON * cell.lo.abs().max(cell.hi.abs()).max(1e-300);
        if cell.hi - cell.lo <= width_floor {
            frozen.push(cell);
            continue;
        }
        if splits >= spec.max_subdivisions {
            heap.push(cell);
            let partial = neumaier(heap.iter().chain(&frozen).map(|c| c.value));
            return Err(Error::NonConvergence {
                partial,
                error: total_err,
                subdivisions: splits,
            });
        }
        splits += 1;
        let map = pieces[cell.piece].map;
        let mid = 0.5 * (cell.lo + cell.hi);
        let (v1, e1) = gk15(&mut f, &map, cell.lo, mid)?;
        let (v2, e2) = gk15(&mut f, &map, mid, cell.hi)?;
        total += v1 + v2 - cell.value;
        total_err += e1 + e2 - cell.error;
        heap.push(Cell { piece: cell.piece, lo: cell.lo, hi: mid, value: v1, error: e1 });
        heap.push(Cell { piece: cell.piece, lo: mid, hi: cell.hi, value: v2, error: e2 });
    }
    let mut cells: Vec<Cell> = heap.into_vec();
    cells.extend(frozen);
    cells.sort_by(|a, b| a.piece.cmp(&b.piece).then(a.lo.total_cmp(&b.lo)));
    Ok(QuadratureResult {
        value: neumaier(cells.iter().map(|c| c.value)),
        error: neumaier(cells.iter().map(|c| c.error)).abs(),
        subdivisions: splits,
    })
}

/// Behaviour of a half-line integrand beyond the tail switch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Decays like `t^{-q}` with `q > 1`; integrated through [`Map::PowerTail`].
    Algebraic(f64),
    /// Handled by the caller (vanishes, or is integrated separately).
    Truncate,
}

/// Building block of a composite integral in one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// `[lo, hi]`; singular ends get an exponential map toward the endpoint.
    Finite {
        lo: f64,
        hi: f64,
        lo_singular: bool,
        hi_singular: bool,
    },
    /// `(0, inf)` in the offset variable `t`, refined geometrically toward
    /// `t = 0` up to `scale`, then `tail` beyond. The layer `(0, cutoff)` is
    /// taken by a one-point rule.
    HalfLine { scale: f64, tail: Tail, cutoff: f64 },
    /// `[start, inf)` for an integrand decaying like `t^{-q}`.
    PowerTail { start: f64, q: f64 },
}

impl Segment {
    pub fn regular(lo: f64, hi: f64) -> Self {
        Segment::Finite { lo, hi, lo_singular: false, hi_singular: false }
    }

    pub fn singular_ends(lo: f64, hi: f64) -> Self {
        Segment::Finite { lo, hi, lo_singular: true, hi_singular: true }
    }

    /// Half-line with the default innermost layer `1e-15 * scale`.
    pub fn half_line(scale: f64, tail: Tail) -> Self {
        Segment::HalfLine { scale, tail, cutoff: CUTOFF_REL * scale }
    }
}

/// Relative size of the innermost layer left to a one-point rule next to a
/// singular endpoint.
const CUTOFF_REL: f64 = 1e-15;

fn cutoff_width(origin: f64, len: f64) -> f64 {
    (CUTOFF_REL * len).max(8.0 * f64::EPSILON * origin.abs())
}

/// Integrate `f` over a union of segments with one global tolerance.
pub fn integrate_segments<F>(mut f: F, segments: &[Segment], spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut pieces = Vec::new();
    // (evaluation point, layer width) for the innermost layers.
    let mut layers: Vec<(f64, f64)> = Vec::new();
    for seg in segments {
        match *seg {
            Segment::Finite { lo, hi, lo_singular, hi_singular } => {
                if !(hi > lo) {
                    continue;
                }
                if !lo_singular && !hi_singular {
                    pieces.push(Piece { map: Map::Linear, lo, hi });
                    continue;
                }
                let len = hi - lo;
                let (left_end, right_start) = match (lo_singular, hi_singular) {
                    (true, true) => (0.5 * (lo + hi), 0.5 * (lo + hi)),
                    (true, false) => (hi, hi),
                    _ => (lo, lo),
                };
                if lo_singular {
                    let w = cutoff_width(lo, len);
                    layers.push((lo + w, w));
                    pieces.push(Piece {
                        map: Map::ExpAbove { origin: lo },
                        lo: w.ln(),
                        hi: (left_end - lo).ln(),
                    });
                } else if left_end > lo {
                    pieces.push(Piece { map: Map::Linear, lo, hi: left_end });
                }
                if hi_singular {
                    let w = cutoff_width(hi, len);
                    layers.push((hi - w, w));
                    pieces.push(Piece {
                        map: Map::ExpBelow { origin: hi },
                        lo: w.ln(),
                        hi: (hi - right_start).ln(),
                    });
                } else if hi > right_start {
                    pieces.push(Piece { map: Map::Linear, lo: right_start, hi });
                }
            }
            Segment::PowerTail { start, q } => {
                if q <= 1.0 {
                    return Err(Error::Divergent { decay: q, dim: 1 });
                }
                pieces.push(Piece { map: Map::PowerTail { start, q }, lo: 0.0, hi: 1.0 });
            }
            Segment::HalfLine { scale, tail, cutoff } => {
                let w = cutoff.min(CUTOFF_REL * scale);
                layers.push((w, w));
                pieces.push(Piece { map: Map::ExpAbove { origin: 0.0 }, lo: w.ln(), hi: scale.ln() });
                if let Tail::Algebraic(q) = tail {
                    if q <= 1.0 {
                        return Err(Error::Divergent { decay: q, dim: 1 });
                    }
                    pieces.push(Piece { map: Map::PowerTail { start: scale, q }, lo: 0.0, hi: 1.0 });
                }
            }
        }
    }
    let mut result = integrate_pieces(&mut f, &pieces, spec)?;
    for (x, w) in layers {
        let v = f(x)? * w;
        if !v.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
        result.value += v;
        result.error += v.abs();
    }
    Ok(result)
}

/// `int_lo^hi f` with optional endpoint singularities.
pub fn integrate_interval<F>(f: F, lo: f64, hi: f64, singular_ends: bool, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let seg = if singular_ends {
        Segment::singular_ends(lo, hi)
    } else {
        Segment::regular(lo, hi)
    };
    integrate_segments(f, &[seg], spec)
}

/// `int_start^inf cos(omega r + phase) r^{-p} dr` for `start > 0`, `p > 0`.
///
/// The oscillatory tail is rotated onto `r = start + i t / omega`, where the
/// integrand decays like `e^{-t}`.
pub fn oscillatory_power_tail(omega: f64, phase: f64, start: f64, p: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(start > 0.0) || !(p > 0.0) {
        return Err(Error::InvalidParameter("oscillatory tail needs start > 0, p > 0".into()));
    }
    if omega == 0.0 {
        if p <= 1.0 {
            return Err(Error::Divergent { decay: p, dim: 1 });
        }
        return Ok(QuadratureResult::exact(phase.cos() * start.powf(1.0 - p) / (p - 1.0)));
    }
    let (omega, phase) = if omega < 0.0 { (-omega, -phase) } else { (omega, phase) };
    let g = |t: f64| Complex64::new(start, t / omega).powf(-p) * (-t).exp();
    let spec = spec.tightened(10.0);
    let upper = 60.0;
    let re = integrate_interval(|t| Ok(g(t).re), 0.0, upper, false, &spec)?;
    let im = integrate_interval(|t| Ok(g(t).im), 0.0, upper, false, &spec)?;
    let rot = Complex64::new(0.0, 1.0 / omega) * Complex64::from_polar(1.0, phase + omega * start);
    let val = rot * Complex64::new(re.value, im.value);
    let bound = start.powf(-p) * (-upper).exp() / omega;
    Ok(QuadratureResult {
        value: val.re,
        error: (re.error + im.error) / omega + bound,
        subdivisions: re.subdivisions + im.subdivisions,
    })
}

/// Angular integral over `[lo, hi]` split at `breaks`. With `singular_ends`
/// the two outer ends are refined geometrically (chord lengths vanish like
/// square roots at tangent directions).
pub fn integrate_angles<F>(f: F, lo: f64, hi: f64, breaks: &[f64], singular_ends: bool, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut cuts = vec![lo];
    cuts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    cuts.push(hi);
    let n = cuts.len() - 1;
    let segs: Vec<Segment> = cuts
        .windows(2)
        .enumerate()
        .map(|(i, w)| Segment::Finite {
            lo: w[0],
            hi: w[1],
            lo_singular: singular_ends && i == 0,
            hi_singular: singular_ends && i == n - 1,
        })
        .collect();
    integrate_segments(f, &segs, spec)
}

/// Directions out of an interior anchor: the two rays in 1D, a full turn
/// in 2D (split at corner directions). `ray` returns the radial integral
/// along one direction.
pub fn integrate_directions<F>(domain: &Domain, anchor: &Point, mut ray: F, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(Direction) -> Result<QuadratureResult>,
{
    if domain.dim() == 1 {
        return Ok(ray(Direction::positive())? + ray(Direction::negative())?);
    }
    let breaks = domain.corner_angles(anchor);
    let mut inner_err = 0.0;
    let mut inner_work = 0;
    let mut outer = integrate_angles(
        |th| {
            let r = ray(Direction::from_angle(th))?;
            inner_err += r.error;
            inner_work += r.subdivisions;
            Ok(r.value)
        },
        0.0,
        TAU,
        &breaks,
        false,
        spec,
    )?;
    outer.subdivisions += inner_work;
    Ok(outer)
}

/// `int_Omega f`.
pub fn integrate_over_domain<F>(f: F, domain: &Domain, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(&Point) -> Result<f64>,
{
    spec.validate()?;
    let center = domain.center();
    integrate_over_domain_from(f, domain, &center, 0.0, spec)
}

/// `int_{Omega \ B_r0(anchor)} f` in polar coordinates about an interior anchor.
pub fn integrate_over_domain_from<F>(f: F, domain: &Domain, anchor: &Point, r0: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(&Point) -> Result<f64>,
{
    match domain {
        Domain::Interval { a, b } => {
            let x = anchor.x();
            let segs = [
                Segment::Finite { lo: *a, hi: x - r0, lo_singular: true, hi_singular: false },
                Segment::Finite { lo: x + r0, hi: *b, lo_singular: false, hi_singular: true },
            ];
            integrate_segments(|y| f(&Point::d1(y)), &segs, spec)
        }
        _ => {
            let inner = spec.inner();
            integrate_directions(
                domain,
                anchor,
                |dir| {
                    let r_exit = domain.ray_exit(anchor, &dir);
                    let seg = Segment::Finite { lo: r0, hi: r_exit, lo_singular: false, hi_singular: true };
                    integrate_segments(|r| Ok(f(&anchor.along(&dir, r))? * r), &[seg], &inner)
                },
                spec,
            )
        }
    }
}

/// `int_{R^n \ Omega} f` for an integrand bounded by `M |z|^{-decay}` at
/// infinity, in polar coordinates about the domain center.
pub fn integrate_exterior<F>(f: F, decay: f64, domain: &Domain, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(&Point) -> Result<f64>,
{
    spec.validate()?;
    let n = domain.dim();
    if decay <= n as f64 {
        return Err(Error::Divergent { decay, dim: n });
    }
    let center = domain.center();
    let q = decay - n as f64 + 1.0;
    exterior_rays(
        domain,
        &center,
        |dir, r_exit, t| {
            let r = r_exit + t;
            Ok(f(&center.along(&dir, r))? * r.powi(n as i32 - 1))
        },
        Tail::Algebraic(q),
        spec,
    )
}

/// Exterior integral along rays from an interior anchor.
///
/// `g(dir, r_exit, t)` is the full radial integrand (Jacobian included) at
/// offset `t` past the boundary crossing `r_exit`. Passing the offset keeps
/// distances to the boundary exact in 1D.
pub fn exterior_rays<G>(domain: &Domain, anchor: &Point, g: G, tail: Tail, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    G: Fn(Direction, f64, f64) -> Result<f64>,
{
    let scale = spec.tail_factor * domain.diameter();
    let inner = if domain.dim() == 1 { spec.clone() } else { spec.inner() };
    integrate_directions(
        domain,
        anchor,
        |dir| {
            let r_exit = domain.ray_exit(anchor, &dir);
            integrate_segments(|t| g(dir, r_exit, t), &[Segment::half_line(scale, tail)], &inner)
        },
        spec,
    )
}

/// Principal value `int_{B_rho(x)} (u(x) - u(y)) |x - y|^{-n-2s} dy` by
/// antipodal pairing.
///
/// `paired(h)` returns the second difference integrated over the sphere of
/// radius `h` up to antipodes: `2u(x) - u(x+h) - u(x-h)` in 1D, and
/// `int_0^pi [2u(x) - u(x+h e) - u(x-h e)] dtheta` in 2D. Either way the
/// ball integral is `int_0^rho paired(h) h^{-1-2s} dh`, with `paired(h) =
/// O(h^2)` for `C^2` fields. `regular(h)` is an extra bounded radial
/// integrand integrated over the same `(0, rho)`.
///
/// Below `h0 = rho / 100` the quotient `paired(h) / h^2 = a + b h^2` is fitted
/// from `h0` and `2 h0` and integrated in closed form, avoiding cancellation
/// in the second difference.
pub fn ring_principal_value<P, R>(mut paired: P, mut regular: R, rho: f64, s: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    P: FnMut(f64) -> Result<f64>,
    R: FnMut(f64) -> Result<f64>,
{
    let h0 = 1e-2 * rho;
    let q1 = paired(h0)? / (h0 * h0);
    let q2 = paired(2.0 * h0)? / (4.0 * h0 * h0);
    let b = (q2 - q1) / (3.0 * h0 * h0);
    let a = q1 - b * h0 * h0;
    let small = a * h0.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s) + b * h0.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s);
    let small_err = 10.0 * b.abs() * h0.powf(6.0 - 2.0 * s) / (rho * rho)
        + 8.0 * f64::EPSILON * q1.abs().max(1.0) * h0.powf(2.0 - 2.0 * s);
    let regular_small = integrate_interval(&mut regular, 0.0, h0, false, spec)?;

    let pieces = [Piece { map: Map::ExpAbove { origin: 0.0 }, lo: h0.ln(), hi: rho.ln() }];
    let main = integrate_pieces(
        |h| Ok(paired(h)? * h.powf(-1.0 - 2.0 * s) + regular(h)?),
        &pieces,
        spec,
    )?;
    Ok(main + regular_small + QuadratureResult { value: small, error: small_err, subdivisions: 0 })
}
