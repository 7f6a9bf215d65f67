//! Monte Carlo simulation of the resurrection jump process.
//!
//! A particle jumps inside Omega with the truncated kernel
//! `|h|^{-n-2s}` on `delta < |h| < R`. When a jump lands at `z` outside
//! Omega it comes back immediately to `y` in Omega with density
//! `|z - y|^{-n-2s} / M(z)`. Time is event-indexed: one step is one jump.
//!
//! All randomness comes from ChaCha8 streams keyed by (seed, stream id), so
//! results are identical for any thread count.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{Direction, Domain, Point};
use crate::operators::{FractionalOrder, Operators};
use crate::stats::{ks_p_value, ks_uniform, Histogram, RunningMoments};

/// Rejection attempts allowed per resurrection.
pub const MAX_ATTEMPTS: usize = 10_000;
/// Weight of the uniform component in the resurrection proposal.
pub const UNIFORM_WEIGHT: f64 = 0.1;

/// Deterministic generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn uniform_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Direction {
    if n == 1 {
        if rng.gen::<bool>() {
            Direction::positive()
        } else {
            Direction::negative()
        }
    } else {
        Direction::from_angle(TAU * rng.gen::<f64>())
    }
}

/// Surface measure of the unit sphere in dimension 1 or 2.
fn sphere_measure(n: usize) -> f64 {
    if n == 1 {
        2.0
    } else {
        TAU
    }
}

/// Uniform on (0, 1], safe as a base for negative powers.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

fn check_order(domain: &Domain, order: &FractionalOrder) -> Result<()> {
    if order.n != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: order.n });
    }
    Ok(())
}

/// Draw a return point `y` in Omega with density `|z - y|^{-n-2s} / M(z)`.
///
/// Rejection sampling from `q = a U + (1 - a) P`, where `U` is uniform on
/// Omega and `P` is the kernel itself restricted to `|y - z| > d(z)`, sampled
/// exactly as a Pareto radius times a uniform direction. `P` concentrates at
/// the boundary point nearest `z`; `U` keeps the acceptance rate bounded
/// below in the far field. The target-to-proposal ratio is increasing in the
/// kernel value, so its supremum sits at `|y - z| = d(z)` and `M(z)` cancels.
pub fn sample_resurrection<R: Rng + ?Sized>(
    z: &Point,
    domain: &Domain,
    order: &FractionalOrder,
    rng: &mut R,
) -> Result<Point> {
    check_order(domain, order)?;
    if !domain.is_exterior(z)? {
        return Err(Error::Geometry(format!(
            "resurrection needs an exit point outside the closure, got {:?}",
            z.coords()
        )));
    }
    let n = domain.dim();
    let s = order.s;
    let d = domain.boundary_distance(z)?;
    let p = n as f64 + 2.0 * s;
    let a = UNIFORM_WEIGHT / domain.measure();
    let b = (1.0 - UNIFORM_WEIGHT) * 2.0 * s * d.powi(-(n as i32)) / sphere_measure(n);
    for _ in 0..MAX_ATTEMPTS {
        let y = if rng.gen::<f64>() < UNIFORM_WEIGHT {
            domain.sample_uniform(rng)
        } else {
            let r = d * open_unit(rng).powf(-1.0 / (2.0 * s));
            let dir = uniform_direction(n, rng);
            let y = z.along(&dir, r);
            if !domain.contains_unchecked(&y) {
                continue;
            }
            y
        };
        let kappa = (d / z.dist(&y)).min(1.0).powf(p);
        let accept = kappa * (a + b) / (a + b * kappa);
        if rng.gen::<f64>() < accept {
            return Ok(y);
        }
    }
    Err(Error::SamplingFailure { attempts: MAX_ATTEMPTS, point: z.coords().to_vec() })
}

/// Conditional CDF of the return point on `(a, b)` given the exit point `z`.
pub fn resurrection_cdf_1d(a: f64, b: f64, s: f64, z: f64, y: f64) -> f64 {
    let y = y.clamp(a, b);
    let g = |t: f64| t.powf(-2.0 * s);
    let f = if z > b {
        (g(z - y) - g(z - a)) / (g(z - b) - g(z - a))
    } else {
        (g(a - z) - g(y - z)) / (g(a - z) - g(b - z))
    };
    f.clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// generator estimate

/// Settings for [`estimate_generator`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub samples: usize,
    /// Small-jump radius; `None` selects `1e-3 * diameter`.
    pub delta: Option<f64>,
    /// Standard errors above this mark the estimate inconclusive.
    pub max_std_error: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { seed: 0, samples: 100_000, delta: None, max_std_error: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub inconclusive: bool,
}

impl GeneratorEstimate {
    /// `|estimate - reference| <= k * std_error + reference_error + floor`,
    /// where the floor `1e-10 * (1 + |reference|)` absorbs rounding when the
    /// sample variance vanishes (for instance constant second differences).
    pub fn agrees_with(&self, reference: f64, reference_error: f64, k: f64) -> bool {
        let floor = 1e-10 * (1.0 + reference.abs());
        (self.estimate - reference).abs() <= k * self.std_error + reference_error + floor
    }
}

const CHUNK: usize = 1024;

/// Radial stratum of the jump integral.
#[derive(Debug, Clone, Copy)]
enum Stratum {
    /// `(0, hi)` or `(lo, hi)` with density proportional to `r^{1-2s}`.
    Inner { lo: f64, hi: f64 },
    /// `(lo, inf)` with the Pareto density `r^{-1-2s}`.
    Tail { lo: f64 },
}

impl Stratum {
    /// Draw `r` and return `(r, w)` with `w = |S| r^{-1-2s} / q(r)`.
    fn draw<R: Rng + ?Sized>(&self, s: f64, sphere: f64, rng: &mut R) -> (f64, f64) {
        match *self {
            Stratum::Inner { lo, hi } => {
                let e = 2.0 - 2.0 * s;
                let (l, h) = (lo.powf(e), hi.powf(e));
                let r = (l + rng.gen::<f64>() * (h - l)).powf(1.0 / e);
                (r, sphere * (h - l) / (e * r * r))
            }
            Stratum::Tail { lo } => {
                let r = lo * open_unit(rng).powf(-1.0 / (2.0 * s));
                (r, sphere * lo.powf(-2.0 * s) / (2.0 * s))
            }
        }
    }
}

/// Monte Carlo estimate of `c_{n,s} int (u(x) - u(y)) |x - y|^{-n-2s} dy`.
///
/// The radial integral is split into strata `(0, delta)`, `(delta, d(x))`
/// and `(d(x), inf)`. The two inner strata draw `r` from `r^{1-2s}` so the
/// importance weight is `O(r^{-2})` against the `O(r^2)` antipodal second
/// difference `u(x) - (u(x + h) + u(x - h)) / 2`; the tail draws from the
/// kernel itself. Exterior values come from the field's exterior rule.
pub fn estimate_generator(
    ops: &Operators,
    field: &ScalarField,
    x: &Point,
    config: &GeneratorConfig,
) -> Result<GeneratorEstimate> {
    let domain = ops.domain();
    let n = domain.dim();
    let s = ops.order().s;
    let dist = ops.require_interior(x)?;
    let delta = config.delta.unwrap_or(1e-3 * domain.diameter());
    if !(delta > 0.0) || delta >= dist {
        return Err(Error::InvalidParameter(format!(
            "small-jump radius {delta} must lie in (0, dist(x, boundary) = {dist})"
        )));
    }
    if config.samples < 3 {
        return Err(Error::InvalidParameter("generator estimate needs at least 3 samples".into()));
    }
    let sphere = sphere_measure(n);
    let ux = field.rule.eval(x);
    let u = |p: &Point| -> Result<f64> {
        if domain.contains_unchecked(p) || domain.boundary_distance_unchecked(p) == 0.0 {
            Ok(field.rule.eval(p))
        } else {
            ops.exterior_value(field, p)
        }
    };

    let n0 = config.samples / 5;
    let n1 = 2 * config.samples / 5;
    let strata = [
        (Stratum::Inner { lo: 0.0, hi: delta }, n0.max(1)),
        (Stratum::Inner { lo: delta, hi: dist }, n1.max(1)),
        (Stratum::Tail { lo: dist }, (config.samples - n0 - n1).max(1)),
    ];

    let mut estimate = 0.0;
    let mut variance = 0.0;
    let mut total = 0;
    for (k, (stratum, count)) in strata.iter().enumerate() {
        let chunks: Vec<(usize, usize)> = (0..count.div_ceil(CHUNK))
            .map(|c| (c, CHUNK.min(count - c * CHUNK)))
            .collect();
        let parts: Vec<Result<RunningMoments>> = chunks
            .par_iter()
            .map(|&(c, len)| {
                let mut rng = stream_rng(config.seed, ((k as u64) << 40) | c as u64);
                let mut m = RunningMoments::default();
                for _ in 0..len {
                    let (r, w) = stratum.draw(s, sphere, &mut rng);
                    let dir = if n == 1 {
                        Direction::positive()
                    } else {
                        Direction::from_angle(PI * rng.gen::<f64>())
                    };
                    let plus = u(&x.along(&dir, r))?;
                    let minus = u(&x.along(&dir, -r))?;
                    m.push(w * (ux - 0.5 * (plus + minus)));
                }
                Ok(m)
            })
            .collect();
        let mut acc = RunningMoments::default();
        for p in parts {
            acc.merge(&p?);
        }
        estimate += acc.mean();
        variance += acc.variance() / acc.count() as f64;
        total += acc.count() as usize;
    }
    let c = ops.order().c_ns;
    let std_error = c * variance.sqrt();
    Ok(GeneratorEstimate {
        estimate: c * estimate,
        std_error,
        samples: total,
        inconclusive: !(std_error <= config.max_std_error),
    })
}

// ---------------------------------------------------------------------------
// jump chain

/// Settings for the resurrection jump chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessConfig {
    pub seed: u64,
    pub particles: usize,
    pub steps: usize,
    pub order: FractionalOrder,
    pub domain: Domain,
    /// Smallest jump length.
    pub delta: f64,
    /// Largest jump length; `None` selects `10 * diameter`.
    pub max_jump: Option<f64>,
    /// Bins per axis of the occupation histogram.
    pub bins: usize,
}

impl ProcessConfig {
    pub fn new(domain: Domain, s: f64) -> Result<Self> {
        let order = FractionalOrder::new(domain.dim(), s)?;
        let delta = 1e-3 * domain.diameter();
        Ok(ProcessConfig {
            seed: 0,
            particles: 1000,
            steps: 100,
            order,
            domain,
            delta,
            max_jump: None,
            bins: 50,
        })
    }

    pub fn jump_cap(&self) -> f64 {
        self.max_jump.unwrap_or(10.0 * self.domain.diameter())
    }

    pub fn validate(&self, start: &Point) -> Result<()> {
        check_order(&self.domain, &self.order)?;
        if self.particles == 0 {
            return Err(Error::InvalidParameter("particle count must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
        }
        let dist = self.domain.boundary_distance(start)?;
        if !self.domain.contains(start)? {
            return Err(Error::Geometry(format!("start {:?} is not in the domain", start.coords())));
        }
        if !(self.delta > 0.0) || self.delta >= dist {
            return Err(Error::InvalidParameter(format!(
                "delta = {} must lie in (0, dist(start, boundary) = {dist})",
                self.delta
            )));
        }
        if !(self.jump_cap() > self.delta) || !self.jump_cap().is_finite() {
            return Err(Error::InvalidParameter(format!(
                "max jump {} must be finite and exceed delta",
                self.jump_cap()
            )));
        }
        Ok(())
    }
}

/// One recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    /// Positions after each step, starting with the initial point.
    pub positions: Vec<Point>,
    /// `(exit point, return point)` pairs in chronological order.
    pub resurrections: Vec<(Point, Point)>,
}

enum Visit<'a> {
    Position(&'a Point),
    Resurrection(&'a Point, &'a Point),
}

fn walk(
    config: &ProcessConfig,
    start: &Point,
    particle: u64,
    mut visit: impl FnMut(Visit<'_>),
) -> Result<()> {
    let n = config.domain.dim();
    let two_s = 2.0 * config.order.s;
    let lo = config.delta.powf(-two_s);
    let hi = config.jump_cap().powf(-two_s);
    let mut rng = stream_rng(config.seed, particle);
    let mut x = *start;
    visit(Visit::Position(&x));
    for step in 0..config.steps {
        loop {
            let r = (lo - rng.gen::<f64>() * (lo - hi)).powf(-1.0 / two_s);
            let y = x.along(&uniform_direction(n, &mut rng), r);
            if config.domain.contains_unchecked(&y) {
                x = y;
                break;
            }
            if config.domain.boundary_distance_unchecked(&y) == 0.0 {
                // landed exactly on the boundary: measure zero, redraw
                continue;
            }
            let back = sample_resurrection(&y, &config.domain, &config.order, &mut rng)
                .map_err(|e| Error::Path { particle, step, source: Box::new(e) })?;
            visit(Visit::Resurrection(&y, &back));
            x = back;
            break;
        }
        visit(Visit::Position(&x));
    }
    Ok(())
}

/// Simulate one particle and keep its full path.
pub fn simulate_path(config: &ProcessConfig, start: &Point, particle: u64) -> Result<PathSample> {
    config.validate(start)?;
    let mut positions = Vec::with_capacity(config.steps + 1);
    let mut resurrections = Vec::new();
    walk(config, start, particle, |v| match v {
        Visit::Position(p) => positions.push(*p),
        Visit::Resurrection(z, y) => resurrections.push((*z, *y)),
    })?;
    Ok(PathSample { positions, resurrections })
}

/// Occupation counts on a tensor grid; `counts` is row-major with the first
/// axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Occupation {
    pub edges: Vec<Vec<f64>>,
    pub counts: Vec<u64>,
}

impl Occupation {
    fn new(domain: &Domain, bins: usize) -> Self {
        let (lo, hi) = domain.bounding_box();
        let edges = (0..domain.dim())
            .map(|k| Histogram::uniform(lo[k], hi[k], bins).edges)
            .collect();
        Occupation { edges, counts: vec![0; bins.pow(domain.dim() as u32)] }
    }

    fn index(&self, p: &Point) -> usize {
        let mut idx = 0;
        for (k, e) in self.edges.iter().enumerate() {
            let bins = e.len() - 1;
            let i = e.partition_point(|&v| v <= p.coords()[k]).saturating_sub(1).min(bins - 1);
            idx = idx * bins + i;
        }
        idx
    }

    fn merge(&mut self, other: &Occupation) {
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Pooled goodness-of-fit of return points against the per-exit law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnFit {
    pub events: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
}

/// Aggregated output of [`run_process`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessStatistics {
    pub seed: u64,
    pub particles: usize,
    pub steps: usize,
    pub dimension: usize,
    pub s: f64,
    pub delta: f64,
    pub max_jump: f64,
    pub resurrections: u64,
    pub max_resurrections_per_particle: u64,
    pub occupation: Occupation,
    /// Histogram of `dist(z, boundary)` over exit points `z`.
    pub exit_distance: Histogram,
    /// Probability-integral-transform KS test of the return points; one
    /// dimension only, where the conditional CDF is closed form.
    pub return_fit: Option<ReturnFit>,
}

struct ParticleStats {
    occupation: Occupation,
    exit: Histogram,
    resurrections: u64,
    pit: Vec<f64>,
}

/// Run `config.particles` independent chains from `start` for
/// `config.steps` jumps each.
pub fn run_process(config: &ProcessConfig, start: &Point) -> Result<ProcessStatistics> {
    config.validate(start)?;
    let diam = config.domain.diameter();
    let exit_template = Histogram::log_spaced(1e-8 * diam, config.jump_cap(), 30);
    let occ_template = Occupation::new(&config.domain, config.bins);
    let interval = match config.domain {
        Domain::Interval { a, b } => Some((a, b)),
        _ => None,
    };
    let s = config.order.s;

    let per_particle: Vec<Result<ParticleStats>> = (0..config.particles as u64)
        .into_par_iter()
        .map(|particle| {
            let mut st = ParticleStats {
                occupation: occ_template.clone(),
                exit: exit_template.clone(),
                resurrections: 0,
                pit: Vec::new(),
            };
            walk(config, start, particle, |v| match v {
                Visit::Position(p) => {
                    let i = st.occupation.index(p);
                    st.occupation.counts[i] += 1;
                }
                Visit::Resurrection(z, y) => {
                    st.resurrections += 1;
                    st.exit.add(config.domain.boundary_distance_unchecked(z));
                    if let Some((a, b)) = interval {
                        st.pit.push(resurrection_cdf_1d(a, b, s, z.x(), y.x()));
                    }
                }
            })?;
            Ok(st)
        })
        .collect();

    let mut occupation = occ_template;
    let mut exit_distance = exit_template;
    let mut resurrections = 0;
    let mut max_per = 0;
    let mut pit = Vec::new();
    for st in per_particle {
        let st = st?;
        occupation.merge(&st.occupation);
        exit_distance.merge(&st.exit);
        resurrections += st.resurrections;
        max_per = max_per.max(st.resurrections);
        pit.extend(st.pit);
    }
    let return_fit = match interval {
        Some(_) if !pit.is_empty() => {
            let d = ks_uniform(&pit);
            Some(ReturnFit { events: pit.len(), ks_statistic: d, p_value: ks_p_value(d, pit.len() as f64) })
        }
        _ => None,
    };
    Ok(ProcessStatistics {
        seed: config.seed,
        particles: config.particles,
        steps: config.steps,
        dimension: config.domain.dim(),
        s,
        delta: config.delta,
        max_jump: config.jump_cap(),
        resurrections,
        max_resurrections_per_particle: max_per,
        occupation,
        exit_distance,
        return_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldRule;
    use crate::quadrature::QuadratureSpec;
    use crate::stats::{ks_statistic, ks_two_sample};

    fn unit_interval(s: f64) -> (Domain, FractionalOrder) {
        (Domain::interval(-1.0, 1.0).unwrap(), FractionalOrder::new(1, s).unwrap())
    }

    #[test]
    fn resurrection_matches_closed_form_cdf() {
        let (dom, ord) = unit_interval(0.5);
        let mut rng = stream_rng(7, 0);
        let z = Point::d1(2.0);
        let ys: Vec<f64> = (0..100_000)
            .map(|_| sample_resurrection(&z, &dom, &ord, &mut rng).unwrap().x())
            .collect();
        assert!(ys.iter().all(|&y| y > -1.0 && y < 1.0));
        // int_{-1}^y (2 - t)^{-2} dt / (2/3)
        let d = ks_statistic(&ys, |y| (1.0 / (2.0 - y) - 1.0 / 3.0) / (2.0 / 3.0));
        assert!(d < 0.01, "KS {d}");
    }

    #[test]
    fn cdf_helper_matches_antiderivative() {
        for y in [-0.9, -0.2, 0.4, 0.95] {
            let want = (1.0 / (2.0 - y) - 1.0 / 3.0) / (2.0 / 3.0);
            assert!((resurrection_cdf_1d(-1.0, 1.0, 0.5, 2.0, y) - want).abs() < 1e-14);
            // mirror image from the left
            let left = resurrection_cdf_1d(-1.0, 1.0, 0.5, -2.0, -y);
            assert!((left - (1.0 - want)).abs() < 1e-14);
        }
    }

    #[test]
    fn resurrection_near_and_far() {
        for s in [0.25, 0.75] {
            let (dom, ord) = unit_interval(s);
            for z in [1.0 + 1e-9, 50.0] {
                let mut rng = stream_rng(3, 1);
                let ys: Vec<f64> = (0..20_000)
                    .map(|_| sample_resurrection(&Point::d1(z), &dom, &ord, &mut rng).unwrap().x())
                    .collect();
                let d = ks_statistic(&ys, |y| resurrection_cdf_1d(-1.0, 1.0, s, z, y));
                assert!(d < 0.015, "s={s} z={z} KS {d}");
            }
        }
    }

    #[test]
    fn resurrection_rejects_interior_and_boundary() {
        let (dom, ord) = unit_interval(0.5);
        let mut rng = stream_rng(0, 0);
        assert!(sample_resurrection(&Point::d1(0.3), &dom, &ord, &mut rng).is_err());
        assert!(sample_resurrection(&Point::d1(1.0), &dom, &ord, &mut rng).is_err());
    }

    #[test]
    fn disc_resurrection_is_rotation_equivariant() {
        let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let ord = FractionalOrder::new(2, 0.5).unwrap();
        let radii = |z: Point, seed| {
            let mut rng = stream_rng(seed, 0);
            (0..20_000)
                .map(|_| sample_resurrection(&z, &dom, &ord, &mut rng).unwrap().norm())
                .collect::<Vec<_>>()
        };
        let a = radii(Point::d2(1.3, 0.0), 1);
        let th: f64 = 2.1;
        let b = radii(Point::d2(1.3 * th.cos(), 1.3 * th.sin()), 2);
        // two-sample 1% critical value for 2e4 vs 2e4
        assert!(ks_two_sample(&a, &b) < 1.63 * (2.0 / 20_000f64).sqrt());
    }

    #[test]
    fn generator_of_constant_is_zero() {
        let ops = Operators::new(Domain::interval(-1.0, 1.0).unwrap(), 0.5, QuadratureSpec::default()).unwrap();
        let f = ScalarField::neumann(FieldRule::constant(3.0));
        let cfg = GeneratorConfig { samples: 2000, ..Default::default() };
        let e = estimate_generator(&ops, &f, &Point::d1(0.1), &cfg).unwrap();
        assert!(e.estimate.abs() < 1e-9 && e.std_error < 1e-9, "{e:?}");
        assert!(!e.inconclusive);
    }

    #[test]
    fn generator_of_cosine_is_one() {
        let ops = Operators::new(Domain::interval(-1.0, 1.0).unwrap(), 0.5, QuadratureSpec::default()).unwrap();
        let f = ScalarField::explicit(FieldRule::cos1d(1.0));
        let cfg = GeneratorConfig { samples: 50_000, seed: 11, ..Default::default() };
        let e = estimate_generator(&ops, &f, &Point::d1(0.0), &cfg).unwrap();
        assert!(e.agrees_with(1.0, 0.0, 3.0), "{e:?}");
        assert!(e.std_error < 0.02, "{e:?}");
    }

    #[test]
    fn generator_is_deterministic_and_validates_delta() {
        let ops = Operators::new(Domain::interval(-1.0, 1.0).unwrap(), 0.25, QuadratureSpec::default()).unwrap();
        let f = ScalarField::explicit(FieldRule::cos1d(1.0));
        let cfg = GeneratorConfig { samples: 3000, seed: 5, ..Default::default() };
        let a = estimate_generator(&ops, &f, &Point::d1(0.2), &cfg).unwrap();
        let b = estimate_generator(&ops, &f, &Point::d1(0.2), &cfg).unwrap();
        assert_eq!(a, b);
        let bad = GeneratorConfig { delta: Some(0.5), ..cfg };
        assert!(estimate_generator(&ops, &f, &Point::d1(0.6), &bad).is_err());
    }

    #[test]
    fn zero_steps_stays_at_start() {
        let mut cfg = ProcessConfig::new(Domain::interval(-1.0, 1.0).unwrap(), 0.5).unwrap();
        cfg.steps = 0;
        cfg.particles = 10;
        cfg.bins = 4;
        let st = run_process(&cfg, &Point::d1(0.3)).unwrap();
        assert_eq!(st.occupation.counts, vec![0, 0, 10, 0]);
        assert_eq!(st.resurrections, 0);
        assert!(st.return_fit.is_none());
    }

    #[test]
    fn short_jumps_never_leave() {
        let mut cfg = ProcessConfig::new(Domain::interval(-100.0, 100.0).unwrap(), 0.5).unwrap();
        cfg.delta = 0.1;
        cfg.max_jump = Some(1.0);
        cfg.steps = 50;
        cfg.particles = 100;
        let st = run_process(&cfg, &Point::d1(0.0)).unwrap();
        assert_eq!(st.resurrections, 0);
        assert_eq!(st.occupation.total(), 100 * 51);
    }

    #[test]
    fn paths_stay_inside_and_match_chain() {
        let mut cfg = ProcessConfig::new(Domain::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap(), 0.75).unwrap();
        cfg.steps = 200;
        cfg.delta = 0.05;
        let start = Point::d2(1.0, 0.5);
        let path = simulate_path(&cfg, &start, 3).unwrap();
        assert_eq!(path.positions.len(), 201);
        assert!(path.positions.iter().all(|p| cfg.domain.contains(p).unwrap()));
        for (z, y) in &path.resurrections {
            assert!(cfg.domain.is_exterior(z).unwrap());
            assert!(cfg.domain.contains(y).unwrap());
        }
        assert!(!path.resurrections.is_empty());
    }

    #[test]
    fn chain_returns_follow_per_exit_law() {
        let mut cfg = ProcessConfig::new(Domain::interval(-1.0, 1.0).unwrap(), 0.5).unwrap();
        cfg.particles = 500;
        cfg.steps = 200;
        cfg.seed = 9;
        cfg.delta = 0.02;
        let st = run_process(&cfg, &Point::d1(0.0)).unwrap();
        let fit = st.return_fit.unwrap();
        assert!(fit.events > 1000);
        assert!(fit.p_value > 0.01, "{fit:?}");
        assert_eq!(st.exit_distance.total(), st.resurrections);
        let again = run_process(&cfg, &Point::d1(0.0)).unwrap();
        assert_eq!(st, again);
    }
}
