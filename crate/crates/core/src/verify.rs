//! Numerical checks of the operator identities and bounds.
//!
//! The exterior-elimination identity
//!
//! ```text
//! D^s u(x) = D^s_Omega u(x) - u(x) D^s beta(x) + c int_Omega (u(x) - u(y)) k_beta(x, y) dy
//! ```
//!
//! is checked with the two sides computed along different paths: the left
//! side goes through the Robin extension of `u` and the exterior of the
//! domain, the right side through the kernel `k_beta` and never evaluates
//! `u` outside. The regional term on the right uses its own ring radius, so
//! the two sides share no quadrature nodes.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldRule, RobinWeight, ScalarField};
use crate::geometry::{Direction, Domain, Point};
use crate::kernel::{KernelEvaluation, LogBoundLadder};
use crate::operators::Operators;
use crate::quadrature::{
    exterior_rays, integrate_over_domain_from, ring_principal_value, QuadratureResult,
    QuadratureSpec, Tail,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Outcome of one check. `verdict` is `pass` iff every residual is at most
/// `tolerance`, and `tolerance` is never below ten times `budget`, the
/// summed quadrature error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub points: Vec<Point>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub residuals: Vec<f64>,
    pub budget: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

impl VerificationReport {
    /// Residuals `|lhs - rhs|` against `max(floor, 10 * budget)`.
    pub fn from_sides(name: &str, points: Vec<Point>, lhs: Vec<f64>, rhs: Vec<f64>, budget: f64, floor: f64) -> Self {
        let residuals = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).collect();
        Self::from_residuals(name, points, lhs, rhs, residuals, budget, floor.max(10.0 * budget))
    }

    pub fn from_residuals(
        name: &str,
        points: Vec<Point>,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        residuals: Vec<f64>,
        budget: f64,
        tolerance: f64,
    ) -> Self {
        let tolerance = tolerance.max(10.0 * budget);
        let ok = residuals.iter().all(|r: &f64| r.is_finite() && *r <= tolerance);
        VerificationReport {
            name: name.to_string(),
            points,
            lhs,
            rhs,
            residuals,
            budget,
            tolerance,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            extra: BTreeMap::new(),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_extra(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

/// Deliberate bugs for testing that the harness can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Flip the sign of the kernel correction term on the right-hand side.
    KernelSignFlip,
}

/// Tolerance floor for identity checks.
pub const IDENTITY_FLOOR: f64 = 1e-6;
/// Tolerance floor for the second form when the weight is 0 or 1 outside.
pub const ALGEBRAIC_FLOOR: f64 = 1e-8;

pub struct Verifier<'a> {
    ops: &'a Operators,
    pub fault: Option<Fault>,
    /// Evaluation points must sit at least this fraction of the diameter
    /// away from the boundary.
    pub min_boundary_fraction: f64,
}

/// Right-hand side pieces of the first form at one point.
struct FirstForm {
    regional: QuadratureResult,
    weight_term: QuadratureResult,
    kernel_term: QuadratureResult,
}

impl FirstForm {
    fn value(&self, ux: f64) -> f64 {
        self.regional.value - ux * self.weight_term.value + self.kernel_term.value
    }

    fn error(&self, ux: f64) -> f64 {
        self.regional.error + ux.abs() * self.weight_term.error + self.kernel_term.error
    }
}

impl<'a> Verifier<'a> {
    pub fn new(ops: &'a Operators) -> Self {
        Verifier { ops, fault: None, min_boundary_fraction: 0.05 }
    }

    pub fn with_fault(mut self, fault: Option<Fault>) -> Self {
        self.fault = fault;
        self
    }

    fn check_points(&self, points: &[Point]) -> Result<()> {
        let domain = self.ops.domain();
        let min = self.min_boundary_fraction * domain.diameter();
        for p in points {
            let d = self.ops.require_interior(p)?;
            if d < min {
                return Err(Error::Geometry(format!(
                    "verification point {:?} is {d:e} from the boundary (minimum {min:e})",
                    p.coords()
                )));
            }
        }
        Ok(())
    }

    fn kernel_sign(&self) -> f64 {
        if self.fault == Some(Fault::KernelSignFlip) {
            -1.0
        } else {
            1.0
        }
    }

    /// `c int_Omega (u(x) - u(y)) k_beta(x, y) dy`, outer integral over `y`.
    fn kernel_term(&self, ops: &Operators, rule: &FieldRule, weight: &RobinWeight, x: &Point) -> Result<QuadratureResult> {
        if weight.is_identically(1.0) {
            return Ok(QuadratureResult::default());
        }
        let ux = rule.eval(x);
        let kernel = KernelCache::new(ops, x, weight);
        let r = integrate_over_domain_from(
            |y| {
                let diff = ux - rule.eval(y);
                if diff == 0.0 {
                    return Ok(0.0);
                }
                Ok(diff * kernel.get(y)?.value)
            },
            ops.domain(),
            x,
            0.0,
            ops.spec(),
        )?;
        let r = QuadratureResult { error: r.error + kernel.error_integral(rule, ux, 0.0)?, ..r };
        Ok(r.scale(ops.order().c_ns * self.kernel_sign()))
    }

    fn first_form(&self, ops: &Operators, rule: &FieldRule, weight: &RobinWeight, x: &Point) -> Result<FirstForm> {
        // Regional term on a different ring than the left-hand side uses.
        let alt = ops.with_spec(QuadratureSpec {
            ring_fraction: 0.5 * ops.spec().ring_fraction,
            ring_radius: None,
            ..ops.spec().clone()
        })?;
        Ok(FirstForm {
            regional: alt.regional_laplacian(rule, x)?,
            weight_term: ops.weight_laplacian_term(weight, x)?,
            kernel_term: self.kernel_term(ops, rule, weight, x)?,
        })
    }

    /// `D^s u = D^s_Omega u - u D^s beta + c int (u(x) - u(y)) k_beta`, with `u`
    /// continued outside by its Robin extension.
    pub fn verify_theorem_identity(&self, rule: &FieldRule, weight: &RobinWeight, points: &[Point]) -> Result<VerificationReport> {
        self.identity("theorem_identity", rule, weight, points)
    }

    /// The identity with `beta = 0` (homogeneous Neumann condition).
    pub fn verify_corollary(&self, rule: &FieldRule, points: &[Point]) -> Result<VerificationReport> {
        self.identity("corollary", rule, &RobinWeight::neumann(), points)
    }

    fn identity(&self, name: &str, rule: &FieldRule, weight: &RobinWeight, points: &[Point]) -> Result<VerificationReport> {
        self.check_points(points)?;
        weight.validate(self.ops.domain().dim())?;
        let field = ScalarField::robin(rule.clone(), weight.clone());
        let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
        let mut budget: f64 = 0.0;
        for x in points {
            let ux = rule.eval(x);
            let l = self.ops.fractional_laplacian(&field, x)?;
            let r = self.first_form(self.ops, rule, weight, x)?;
            lhs.push(l.value);
            rhs.push(r.value(ux));
            budget = budget.max(l.error + r.error(ux));
        }
        Ok(VerificationReport::from_sides(name, points.to_vec(), lhs, rhs, budget, IDENTITY_FLOOR))
    }

    /// Second displayed form, `c PV int_Omega (u(x) - u(y)) (K + k_beta) dy
    /// + u(x) c int_{R^n \ Omega} beta K`, compared with the first form.
    ///
    /// For weights identically 0 or 1 outside the two forms differ only by
    /// algebra, and both are computed at tolerances 100 times tighter so the
    /// comparison can be made at the `1e-8` floor.
    pub fn verify_second_form(&self, rule: &FieldRule, weight: &RobinWeight, points: &[Point]) -> Result<VerificationReport> {
        self.check_points(points)?;
        weight.validate(self.ops.domain().dim())?;
        let algebraic = weight.is_identically(0.0) || weight.is_identically(1.0);
        let tight;
        let (ops, floor) = if algebraic {
            tight = self.ops.with_spec(self.ops.spec().tightened(100.0))?;
            (&tight, ALGEBRAIC_FLOOR)
        } else {
            (self.ops, IDENTITY_FLOOR)
        };
        let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
        let mut budget: f64 = 0.0;
        for x in points {
            let ux = rule.eval(x);
            let first = self.first_form(ops, rule, weight, x)?;
            let second = self.second_form_value(ops, rule, weight, x)?;
            lhs.push(first.value(ux));
            rhs.push(second.value);
            budget = budget.max(first.error(ux) + second.error);
        }
        let report = VerificationReport::from_sides("second_form", points.to_vec(), lhs, rhs, budget, floor);
        Ok(report.with_extra("floor", json!(floor)))
    }

    fn second_form_value(&self, ops: &Operators, rule: &FieldRule, weight: &RobinWeight, x: &Point) -> Result<QuadratureResult> {
        let d = ops.require_interior(x)?;
        let s = ops.order().s;
        let c = ops.order().c_ns;
        let rho = ops.spec().ring_for(d)?;
        let ux = rule.eval(x);
        let sign = self.kernel_sign();
        let no_kernel = weight.is_identically(1.0);
        let kernel = KernelCache::new(ops, x, weight);
        let k = |y: &Point| -> Result<f64> {
            if no_kernel {
                return Ok(0.0);
            }
            Ok(sign * kernel.get(y)?.value)
        };
        let ring = match ops.domain() {
            Domain::Interval { .. } => {
                let at = |h: f64| Point::d1(x.x() + h);
                ring_principal_value(
                    |h| Ok(2.0 * ux - rule.eval(&at(h)) - rule.eval(&at(-h))),
                    |h| {
                        let (yp, ym) = (at(h), at(-h));
                        let dp = ux - rule.eval(&yp);
                        let dm = ux - rule.eval(&ym);
                        let kp = if dp == 0.0 { 0.0 } else { k(&yp)? };
                        let km = if dm == 0.0 { 0.0 } else { k(&ym)? };
                        Ok(dp * kp + dm * km)
                    },
                    rho,
                    s,
                    ops.spec(),
                )?
            }
            _ => {
                let inner = ops.spec().inner();
                ring_principal_value(
                    |h| {
                        Ok(crate::quadrature::integrate_angles(
                            |th| {
                                let e = Direction::from_angle(th);
                                Ok(2.0 * ux - rule.eval(&x.along(&e, h)) - rule.eval(&x.along(&e, -h)))
                            },
                            0.0,
                            std::f64::consts::PI,
                            &[],
                            false,
                            &inner,
                        )?
                        .value)
                    },
                    |h| {
                        Ok(crate::quadrature::integrate_angles(
                            |th| {
                                let y = x.along(&Direction::from_angle(th), h);
                                let diff = ux - rule.eval(&y);
                                Ok(if diff == 0.0 { 0.0 } else { diff * k(&y)? * h })
                            },
                            0.0,
                            std::f64::consts::TAU,
                            &[],
                            false,
                            &inner,
                        )?
                        .value)
                    },
                    rho,
                    s,
                    ops.spec(),
                )?
            }
        };
        let outer = integrate_over_domain_from(
            |y| {
                let diff = ux - rule.eval(y);
                if diff == 0.0 {
                    return Ok(0.0);
                }
                Ok(diff * (ops.order().kernel(x.dist(y)) + k(y)?))
            },
            ops.domain(),
            x,
            rho,
            ops.spec(),
        )?;
        let tail = if weight.is_identically(0.0) || ux == 0.0 {
            QuadratureResult::default()
        } else {
            exterior_rays(
                ops.domain(),
                x,
                |dir, r_exit, t| {
                    let r = r_exit + t;
                    let z = match ops.domain() {
                        Domain::Interval { a, b } => Point::d1(if dir.0[0] > 0.0 { b + t } else { a - t }),
                        _ => x.along(&dir, r),
                    };
                    Ok(weight.value(&z) * r.powf(-1.0 - 2.0 * s))
                },
                Tail::Algebraic(1.0 + 2.0 * s),
                ops.spec(),
            )?
            .scale(ux)
        };
        let total = (ring + outer + tail).scale(c);
        let inner_err = if no_kernel { 0.0 } else { kernel.error_integral(rule, ux, 0.0)? };
        Ok(QuadratureResult { error: total.error + c * inner_err, ..total })
    }

    /// Both integration orders of the exterior double integral at `x`:
    /// outer exterior / inner domain against outer domain / inner exterior
    /// (the latter is the kernel term).
    pub fn verify_fubini_consistency(&self, rule: &FieldRule, weight: &RobinWeight, x: &Point) -> Result<VerificationReport> {
        self.check_points(std::slice::from_ref(x))?;
        let ops = self.ops;
        let s = ops.order().s;
        let ux = rule.eval(x);
        let exterior_first = if weight.is_identically(1.0) {
            QuadratureResult::default()
        } else {
            exterior_rays(
                ops.domain(),
                x,
                |dir, r_exit, t| {
                    let r = r_exit + t;
                    let z = match ops.domain() {
                        Domain::Interval { a, b } => Point::d1(if dir.0[0] > 0.0 { b + t } else { a - t }),
                        _ => x.along(&dir, r),
                    };
                    let beta = weight.value(&z);
                    if beta >= 1.0 || !ops.domain().is_exterior(&z)? {
                        return Ok(0.0);
                    }
                    // M(z)^{-1} int_Omega (u(x) - u(w)) |z - w|^{-n-2s} dw
                    let inner = ops.weighted_average_of(&|w| ux - rule.eval(w), &z)?;
                    Ok((1.0 - beta) * inner * r.powf(-1.0 - 2.0 * s))
                },
                Tail::Algebraic(1.0 + 2.0 * s),
                ops.spec(),
            )?
            .scale(ops.order().c_ns)
        };
        let domain_first = self.kernel_term(ops, rule, weight, x)?;
        Ok(VerificationReport::from_sides(
            "fubini_consistency",
            vec![*x],
            vec![exterior_first.value],
            vec![domain_first.value],
            exterior_first.error + domain_first.error,
            IDENTITY_FLOOR,
        ))
    }

    /// Comparability `M(z) ~ d^{-2s} min d^{-n-2s}` on a ladder of exterior
    /// distances. Residuals are the ratios normalized by their minimum, and
    /// the tolerance is `ratio_bound`.
    pub fn verify_mass_bounds(&self, distances: &[f64], ratio_bound: f64) -> Result<VerificationReport> {
        let ops = self.ops;
        let domain = ops.domain();
        let s = ops.order().s;
        let n = ops.order().n as f64;
        let center = domain.center();
        let q = domain.boundary_point(0.0);
        let len = center.dist(&q);
        let dir = Direction([(q.x() - center.x()) / len, (q.y() - center.y()) / len]);
        let mut points = Vec::new();
        let (mut mass, mut env) = (Vec::new(), Vec::new());
        for &d in distances {
            let z = match domain {
                Domain::Interval { b, .. } => Point::d1(b + d),
                _ => center.along(&dir, len + d),
            };
            mass.push(ops.mass_integral(&z)?);
            env.push(d.powf(-2.0 * s).min(d.powf(-n - 2.0 * s)));
            points.push(z);
        }
        let ratios: Vec<f64> = mass.iter().zip(&env).map(|(m, e)| m / e).collect();
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let residuals = ratios.iter().map(|r| r / min).collect();
        let mut report = VerificationReport::from_residuals("mass_bounds", points.clone(), mass.clone(), env, residuals, 0.0, ratio_bound)
            .with_extra("ratios", json!(ratios))
            .with_extra("ratio_min", json!(min))
            .with_extra("ratio_max", json!(max))
            .with_extra("measure", json!(domain.measure()));
        if let (Some(z), Some(m)) = (points.last(), mass.last()) {
            let far = z.dist(&center).powf(n + 2.0 * s) * m;
            report = report
                .with_extra("far_field_scaled_mass", json!(far))
                .with_extra("far_field_relative_error", json!((far / domain.measure() - 1.0).abs()));
        }
        Ok(report)
    }

    /// `k(x, y) / (1 + |ln d(y)|)` along a ladder of distances. Residuals are
    /// the constants normalized by their minimum, against `window`. Slopes of
    /// `k` against `ln(1/d)` go in the extras.
    pub fn verify_log_bounds(&self, x: &Point, weight: &RobinWeight, distances: &[f64], eps: f64, window: f64) -> Result<VerificationReport> {
        let ladder: LogBoundLadder = self.ops.log_bound_ladder(x, weight, distances, eps)?;
        let points = ladder.rungs.iter().map(|r| r.y).collect();
        let values: Vec<f64> = ladder.rungs.iter().map(|r| r.value).collect();
        let upper: Vec<f64> = ladder.rungs.iter().map(|r| r.upper).collect();
        let consts: Vec<f64> = ladder.rungs.iter().map(|r| r.upper_constant).collect();
        let min = consts.iter().copied().fold(f64::INFINITY, f64::min);
        let residuals = consts.iter().map(|c| c / min).collect();
        let budget = ladder.rungs.iter().map(|r| r.error).fold(0.0, f64::max);
        let lower: Vec<Option<f64>> = ladder.rungs.iter().map(|r| r.lower_constant).collect();
        let report = VerificationReport::from_residuals("log_bounds", points, values, upper, residuals, 0.0, window)
            .with_extra("upper_constants", json!(consts))
            .with_extra("lower_constants", json!(lower))
            .with_extra("lower_spread", json!(ladder.lower_spread()))
            .with_extra("slopes", json!(ladder.slopes))
            .with_extra("kernel_error_max", json!(budget));
        // A lower-bound spread outside the window fails the check too.
        let lower_ok = ladder.lower_spread().map_or(true, |s| s <= window);
        Ok(if lower_ok { report } else { VerificationReport { verdict: Verdict::Fail, ..report } })
    }

    /// Slopes `Delta k / Delta ln(1/d)` along the ladder must be positive and
    /// within a factor `ratio_bound` of each other.
    pub fn verify_log_slopes(&self, x: &Point, weight: &RobinWeight, distances: &[f64], ratio_bound: f64) -> Result<VerificationReport> {
        let ladder = self.ops.log_bound_ladder(x, weight, distances, crate::kernel::DEFAULT_EPS)?;
        let slopes = ladder.slopes.clone();
        let min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
        let residuals = slopes
            .iter()
            .map(|v| if min > 0.0 { v / min } else { f64::INFINITY })
            .collect();
        let points = ladder.rungs.iter().skip(1).map(|r| r.y).collect();
        let values: Vec<f64> = ladder.rungs.iter().skip(1).map(|r| r.value).collect();
        Ok(VerificationReport::from_residuals("log_slopes", points, values, slopes.clone(), residuals, 0.0, ratio_bound)
            .with_extra("slopes", json!(slopes)))
    }

    /// `k(x, y) = k(y, x) >= 0` on random interior pairs.
    pub fn verify_kernel_symmetry(&self, weight: &RobinWeight, pairs: usize, seed: u64) -> Result<VerificationReport> {
        let ops = self.ops;
        let domain = ops.domain();
        let margin = 0.025 * domain.diameter();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| loop {
            let p = domain.sample_uniform(rng);
            if domain.boundary_distance_unchecked(&p) > margin {
                return p;
            }
        };
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for _ in 0..pairs {
            xs.push(draw(&mut rng));
            ys.push(draw(&mut rng));
        }
        let (mut lhs, mut rhs, mut residuals) = (Vec::new(), Vec::new(), Vec::new());
        let mut budget: f64 = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            let a = ops.kernel_value(x, y, weight)?;
            let b = ops.kernel_value(y, x, weight)?;
            budget = budget.max(a.error + b.error);
            let negative = (-a.value).max(-b.value).max(0.0);
            residuals.push((a.value - b.value).abs().max(negative));
            lhs.push(a.value);
            rhs.push(b.value);
        }
        Ok(VerificationReport::from_residuals("kernel_symmetry", xs, lhs, rhs, residuals, budget, 1e-14)
            .with_extra("partners", json!(ys)))
    }
}

/// Kernel evaluations `k_beta(x, .)` memoized on exact node positions, so a
/// second, coarse pass can integrate their error estimates.
struct KernelCache<'a> {
    ops: &'a Operators,
    x: &'a Point,
    weight: &'a RobinWeight,
    values: RefCell<HashMap<[u64; 2], KernelEvaluation>>,
}

impl<'a> KernelCache<'a> {
    fn new(ops: &'a Operators, x: &'a Point, weight: &'a RobinWeight) -> Self {
        KernelCache { ops, x, weight, values: RefCell::new(HashMap::new()) }
    }

    fn get(&self, y: &Point) -> Result<KernelEvaluation> {
        if let Some(k) = self.values.borrow().get(&y.key()) {
            return Ok(k.clone());
        }
        let k = self.ops.kernel_value(self.x, y, self.weight)?;
        self.values.borrow_mut().insert(y.key(), k.clone());
        Ok(k)
    }

    /// `int_Omega |u(x) - u(y)| err_k(y) dy` to two digits.
    fn error_integral(&self, rule: &FieldRule, ux: f64, r0: f64) -> Result<f64> {
        let coarse = QuadratureSpec { rel_tol: 1e-2, abs_tol: 1e-16, ..self.ops.spec().clone() };
        let r = integrate_over_domain_from(
            |y| {
                let diff = (ux - rule.eval(y)).abs();
                if diff == 0.0 {
                    return Ok(0.0);
                }
                Ok(diff * self.get(y)?.error)
            },
            self.ops.domain(),
            self.x,
            r0,
            &coarse,
        )?;
        Ok(r.value + r.error)
    }
}
