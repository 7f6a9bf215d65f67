//! The exterior-mediated kernel
//!
//! ```text
//! k_beta(x, y) = int_{R^n \ Omega} (1 - beta(z)) |x - z|^{-n-2s} |y - z|^{-n-2s} / M(z) dz
//! ```
//!
//! and its logarithmic envelopes `1 + |ln dist(y, .)|`.
//!
//! On the interval the exterior integral runs over the distance `t` past each
//! endpoint, so `|x - z| = dist(x, end) + t` exactly and `M` has a closed
//! form. In the plane it runs along rays from `y`, which puts the near
//! singularity of `|y - z|^{-n-2s}` at the start of every ray. Near the
//! boundary the integrand vanishes like `d(z)^{2s}` because `M(z)` blows up
//! like `d(z)^{-2s}`.

use std::cell::Cell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RobinWeight;
use crate::geometry::{support_distance, Domain, Point};
use crate::operators::{exterior_pieces_1d, Operators};
use crate::quadrature::{integrate_directions, integrate_segments, Segment, Tail};

/// Default `eps` in `N_eps = {beta < 1 - eps}` for the lower envelope.
pub const DEFAULT_EPS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEvaluation {
    pub x: Point,
    pub y: Point,
    pub value: f64,
    pub error: f64,
    /// Mass-integral evaluations made by the exterior quadrature.
    pub inner_calls: usize,
}

impl Operators {
    /// `k_beta(x, y)` for interior `x`, `y` (the diagonal is allowed).
    pub fn kernel_value(&self, x: &Point, y: &Point, weight: &RobinWeight) -> Result<KernelEvaluation> {
        self.require_interior(x)?;
        self.require_interior(y)?;
        weight.validate(self.domain().dim())?;
        let calls = Cell::new(0usize);
        let r = if weight.is_identically(1.0) {
            crate::quadrature::QuadratureResult::default()
        } else {
            match *self.domain() {
                Domain::Interval { a, b } => self.kernel_1d(a, b, x.x(), y.x(), weight, &calls)?,
                _ => self.kernel_2d(x, y, weight, &calls)?,
            }
        };
        Ok(KernelEvaluation {
            x: *x,
            y: *y,
            value: r.value.max(0.0),
            error: r.error,
            inner_calls: calls.get(),
        })
    }

    fn kernel_1d(
        &self,
        a: f64,
        b: f64,
        x: f64,
        y: f64,
        weight: &RobinWeight,
        calls: &Cell<usize>,
    ) -> Result<crate::quadrature::QuadratureResult> {
        let s = self.order().s;
        let p = 1.0 + 2.0 * s;
        let len = b - a;
        let scale = self.spec().tail_factor * len;
        let pieces = exterior_pieces_1d(a, b, weight);
        let mut total = crate::quadrature::QuadratureResult::default();
        for right in [true, false] {
            let (dx, dy) = if right { (b - x, b - y) } else { (x - a, y - a) };
            // Weight pieces on this side as (t_lo, t_hi, beta) in the offset variable.
            let mut side: Vec<(f64, f64, f64)> = pieces
                .iter()
                .filter(|(lo, hi, _)| if right { *lo >= b } else { *hi <= a })
                .map(|&(lo, hi, beta)| if right { (lo - b, hi - b, beta) } else { (a - hi, a - lo, beta) })
                .collect();
            side.sort_by(|u, v| u.0.total_cmp(&v.0));
            let integrand = |t: f64| -> Result<f64> {
                calls.set(calls.get() + 1);
                let beta = side
                    .iter()
                    .find(|(lo, hi, _)| *lo <= t && t <= *hi)
                    .map_or(0.0, |piece| piece.2);
                if beta >= 1.0 || t <= 0.0 {
                    return Ok(0.0);
                }
                let m = self.scaled_mass_1d(t, len);
                let log = -p * ((dx + t).ln() + (dy + t).ln()) + 2.0 * s * t.ln() - m.ln();
                Ok((1.0 - beta) * log.exp())
            };
            let mut segs = Vec::new();
            if side.len() == 1 {
                let cutoff = (1e-15 * scale).min(1e-3 * dx.min(dy));
                segs.push(Segment::HalfLine { scale, tail: Tail::Algebraic(p), cutoff });
            } else {
                for (i, &(lo, hi, beta)) in side.iter().enumerate() {
                    if beta >= 1.0 {
                        continue;
                    }
                    if hi.is_infinite() {
                        segs.push(Segment::PowerTail { start: lo, q: p });
                    } else if i == 0 {
                        segs.push(Segment::Finite { lo, hi, lo_singular: true, hi_singular: false });
                    } else {
                        segs.push(Segment::regular(lo, hi));
                    }
                }
            }
            total = total + integrate_segments(integrand, &segs, self.spec())?;
        }
        Ok(total)
    }

    fn kernel_2d(
        &self,
        x: &Point,
        y: &Point,
        weight: &RobinWeight,
        calls: &Cell<usize>,
    ) -> Result<crate::quadrature::QuadratureResult> {
        let s = self.order().s;
        let p = 2.0 + 2.0 * s;
        let domain = self.domain();
        let center = domain.center();
        let scale = self.spec().tail_factor * domain.diameter();
        let inner = self.spec().inner();
        let cutoff = (1e-15 * scale).min(1e-3 * domain.boundary_distance_unchecked(x).min(domain.boundary_distance_unchecked(y)));
        integrate_directions(
            domain,
            y,
            |dir| {
                let r_exit = domain.ray_exit(y, &dir);
                integrate_segments(
                    |t| {
                        let r = r_exit + t;
                        let z = y.along(&dir, r);
                        if !domain.is_exterior(&z)? {
                            // Rounded back onto the closure; the integrand vanishes there.
                            return Ok(0.0);
                        }
                        let beta = weight.value(&z);
                        if beta >= 1.0 {
                            return Ok(0.0);
                        }
                        calls.set(calls.get() + 1);
                        let ell = z.dist(&center);
                        let m = self.scaled_mass_2d(&z)?;
                        let log = -p * (x.dist(&z).ln() + r.ln()) + 2.0 * s * ell.ln() - m.ln() + r.ln();
                        Ok((1.0 - beta) * log.exp())
                    },
                    &[Segment::HalfLine { scale, tail: Tail::Algebraic(1.0 + 2.0 * s), cutoff }],
                    &inner,
                )
            },
            self.spec(),
        )
    }

    /// Kernel values on the product grid `xs x ys`, row-major in `xs`,
    /// evaluated in parallel. Each entry is independent of the schedule.
    pub fn kernel_grid(&self, xs: &[Point], ys: &[Point], weight: &RobinWeight) -> Vec<Result<KernelEvaluation>> {
        let pairs: Vec<(Point, Point)> = xs.iter().flat_map(|x| ys.iter().map(move |y| (*x, *y))).collect();
        pairs.par_iter().map(|(x, y)| self.kernel_value(x, y, weight)).collect()
    }

    /// `1 + |ln dist(y, supp(1 - beta))|`.
    pub fn upper_envelope(&self, y: &Point, weight: &RobinWeight) -> Result<f64> {
        let d = support_distance(self.domain(), weight, y, 0.0)?;
        Ok(1.0 + d.ln().abs())
    }

    /// `1 + |ln dist(y, N_eps)|` with `N_eps = {beta < 1 - eps}`, `eps` in `(0, 1]`.
    pub fn lower_envelope(&self, y: &Point, weight: &RobinWeight, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1]")));
        }
        let d = support_distance(self.domain(), weight, y, eps)?;
        Ok(1.0 + d.ln().abs())
    }

    /// Interior point at distance `d` from `supp(1 - beta)`.
    ///
    /// On the interval both ends are tried. In the plane only uniform
    /// weights are supported; the point sits on the ray from the center
    /// through the boundary point at parameter 0.
    pub fn ladder_point(&self, weight: &RobinWeight, d: f64) -> Result<Point> {
        match *self.domain() {
            Domain::Interval { a, b } => {
                for y in [b - d, a + d] {
                    let p = Point::d1(y);
                    if self.domain().contains_unchecked(&p) {
                        let sd = support_distance(self.domain(), weight, &p, 0.0)?;
                        if (sd - d).abs() <= 1e-12 * d.max(1.0) {
                            return Ok(p);
                        }
                    }
                }
                Err(Error::Geometry(format!("no interior point at distance {d} from supp(1 - beta)")))
            }
            _ => {
                if weight.as_uniform().is_none() {
                    return Err(Error::InvalidParameter(
                        "planar distance ladders need a uniform weight".into(),
                    ));
                }
                support_distance(self.domain(), weight, &self.domain().center(), 0.0)?;
                let c = self.domain().center();
                let q = self.domain().boundary_point(0.0);
                let len = c.dist(&q);
                let dir = crate::geometry::Direction([(q.x() - c.x()) / len, (q.y() - c.y()) / len]);
                let p = c.along(&dir, len - d);
                if !self.domain().contains_unchecked(&p) {
                    return Err(Error::Geometry(format!("distance {d} exceeds the inradius along the ladder ray")));
                }
                Ok(p)
            }
        }
    }

    /// Kernel values and envelope ratios on a ladder of distances to
    /// `supp(1 - beta)`, for fixed `x`.
    pub fn log_bound_ladder(&self, x: &Point, weight: &RobinWeight, distances: &[f64], eps: f64) -> Result<LogBoundLadder> {
        let mut rungs = Vec::with_capacity(distances.len());
        for &d in distances {
            let y = self.ladder_point(weight, d)?;
            let k = self.kernel_value(x, &y, weight)?;
            let upper = self.upper_envelope(&y, weight)?;
            let lower = self.lower_envelope(&y, weight, eps).ok();
            rungs.push(LadderRung {
                distance: d,
                y,
                value: k.value,
                error: k.error,
                upper,
                lower,
                upper_constant: k.value / upper,
                lower_constant: lower.map(|l| l / k.value),
            });
        }
        let slopes = rungs
            .windows(2)
            .map(|w| (w[1].value - w[0].value) / (w[0].distance.ln() - w[1].distance.ln()))
            .collect();
        Ok(LogBoundLadder { x: *x, rungs, slopes })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub distance: f64,
    pub y: Point,
    pub value: f64,
    pub error: f64,
    pub upper: f64,
    pub lower: Option<f64>,
    /// `k / upper`: the empirical constant of the upper bound.
    pub upper_constant: f64,
    /// `lower / k`: the empirical constant of the lower bound.
    pub lower_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBoundLadder {
    pub x: Point,
    pub rungs: Vec<LadderRung>,
    /// `Delta k / Delta ln(1/d)` between consecutive rungs.
    pub slopes: Vec<f64>,
}

impl LogBoundLadder {
    /// `max / min` of the upper-bound constant along the ladder.
    pub fn upper_spread(&self) -> f64 {
        spread(self.rungs.iter().map(|r| r.upper_constant))
    }

    pub fn lower_spread(&self) -> Option<f64> {
        let v: Option<Vec<f64>> = self.rungs.iter().map(|r| r.lower_constant).collect();
        v.map(|v| spread(v.into_iter()))
    }
}

fn spread(v: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), c| (l.min(c), h.max(c)));
    hi / lo
}
