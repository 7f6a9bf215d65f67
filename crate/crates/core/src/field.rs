//! Scalar fields on the domain, their exterior rules, and Robin weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

/// One monomial `coef * y_0^p_0 * y_1^p_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// Closed-form interior rule of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldRule {
    Constant { value: f64 },
    Polynomial { terms: Vec<Monomial> },
    /// `amplitude * cos(wavevector . y + phase)`
    Trigonometric {
        amplitude: f64,
        wavevector: Vec<f64>,
        phase: f64,
    },
    /// `(1 - |y - center|^2 / radius^2)_+^exponent`
    PowerBump {
        center: Vec<f64>,
        radius: f64,
        exponent: f64,
    },
}

/// Declared smoothness class of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Constant,
    Polynomial,
    Trigonometric,
    CustomC2,
}

impl FieldRule {
    pub fn constant(value: f64) -> Self {
        FieldRule::Constant { value }
    }

    /// Univariate polynomial `sum_k coeffs[k] y^k`.
    pub fn poly1d(coeffs: &[f64]) -> Self {
        FieldRule::Polynomial {
            terms: coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(k, c)| Monomial { coef: *c, powers: vec![k as u32] })
                .collect(),
        }
    }

    /// `cos(frequency * y)` in one dimension.
    pub fn cos1d(frequency: f64) -> Self {
        FieldRule::Trigonometric {
            amplitude: 1.0,
            wavevector: vec![frequency],
            phase: 0.0,
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            FieldRule::Constant { .. } => Smoothness::Constant,
            FieldRule::Polynomial { terms } => {
                if terms.iter().all(|t| t.powers.iter().all(|p| *p == 0)) {
                    Smoothness::Constant
                } else {
                    Smoothness::Polynomial
                }
            }
            FieldRule::Trigonometric { .. } => Smoothness::Trigonometric,
            FieldRule::PowerBump { .. } => Smoothness::CustomC2,
        }
    }

    /// Total degree of a polynomial rule (0 for constants); `None` for
    /// rules that are not polynomials.
    pub fn degree(&self) -> Option<u32> {
        match self {
            FieldRule::Constant { .. } => Some(0),
            FieldRule::Polynomial { terms } => Some(
                terms
                    .iter()
                    .filter(|t| t.coef != 0.0)
                    .map(|t| t.powers.iter().sum::<u32>())
                    .max()
                    .unwrap_or(0),
            ),
            _ => None,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            FieldRule::Constant { value } if !value.is_finite() => bad("non-finite constant".into()),
            FieldRule::Polynomial { terms } => {
                for t in terms {
                    if t.powers.len() > dim || !t.coef.is_finite() {
                        return bad(format!("monomial {t:?} does not fit dimension {dim}"));
                    }
                }
                Ok(())
            }
            FieldRule::Trigonometric { amplitude, wavevector, phase } => {
                if wavevector.len() != dim || !amplitude.is_finite() || !phase.is_finite() {
                    return bad(format!("trigonometric field needs a {dim}-vector wavevector"));
                }
                Ok(())
            }
            FieldRule::PowerBump { center, radius, exponent } => {
                if center.len() != dim || !(*radius > 0.0) || !(*exponent >= 0.0) {
                    return bad("power bump needs matching center, radius > 0, exponent >= 0".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        let c = p.raw();
        match self {
            FieldRule::Constant { value } => *value,
            FieldRule::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    t.powers
                        .iter()
                        .enumerate()
                        .fold(t.coef, |acc, (i, k)| acc * c[i].powi(*k as i32))
                })
                .sum(),
            FieldRule::Trigonometric { amplitude, wavevector, phase } => {
                let arg: f64 = wavevector.iter().zip(c).map(|(k, x)| k * x).sum::<f64>() + phase;
                amplitude * arg.cos()
            }
            FieldRule::PowerBump { center, radius, exponent } => {
                let r2: f64 = center.iter().zip(c).map(|(m, x)| (x - m) * (x - m)).sum();
                let base = 1.0 - r2 / (radius * radius);
                if base <= 0.0 {
                    0.0
                } else {
                    base.powf(*exponent)
                }
            }
        }
    }

    /// Largest `|u|` on the domain, used for the boundedness check.
    pub fn sup_on_grid(&self, domain: &Domain, per_axis: usize) -> f64 {
        let (lo, hi) = domain.bounding_box();
        let mut m: f64 = 0.0;
        let ny = if domain.dim() == 1 { 1 } else { per_axis };
        for i in 0..per_axis {
            for j in 0..ny {
                let x = lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / per_axis as f64;
                let y = lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / ny as f64;
                let p = if domain.dim() == 1 { Point::d1(x) } else { Point::d2(x, y) };
                if domain.contains_unchecked(&p) {
                    m = m.max(self.eval(&p).abs());
                }
            }
        }
        m
    }
}

/// How a field is continued outside the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExteriorRule {
    /// The interior rule, evaluated globally.
    Explicit,
    Zero,
    /// The continuation solving `beta u + (1 - beta) N_s u = 0` outside.
    RobinExtension { weight: RobinWeight },
}

/// An interior rule together with an optional exterior continuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarField {
    pub rule: FieldRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exterior: Option<ExteriorRule>,
}

impl ScalarField {
    pub fn interior_only(rule: FieldRule) -> Self {
        ScalarField { rule, exterior: None }
    }

    pub fn explicit(rule: FieldRule) -> Self {
        ScalarField { rule, exterior: Some(ExteriorRule::Explicit) }
    }

    pub fn robin(rule: FieldRule, weight: RobinWeight) -> Self {
        ScalarField {
            rule,
            exterior: Some(ExteriorRule::RobinExtension { weight }),
        }
    }

    pub fn neumann(rule: FieldRule) -> Self {
        ScalarField::robin(rule, RobinWeight::neumann())
    }
}

/// Primitive region of R^n used to declare a Robin weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    /// `{z : normal . z > offset}`
    HalfSpace { normal: Vec<f64>, offset: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    /// Open axis-aligned box; in 1D an open interval.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    pub fn contains(&self, p: &Point) -> bool {
        let c = p.raw();
        match self {
            Region::HalfSpace { normal, offset } => {
                normal.iter().zip(c).map(|(n, x)| n * x).sum::<f64>() > *offset
            }
            Region::Ball { center, radius } => {
                center.iter().zip(c).map(|(m, x)| (x - m) * (x - m)).sum::<f64>() < radius * radius
            }
            Region::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(c)
                .all(|((l, h), x)| *l < x && x < *h),
        }
    }

    /// The region as an open interval of the real line.
    pub(crate) fn interval_1d(&self) -> (f64, f64) {
        match self {
            Region::HalfSpace { normal, offset } => {
                let n = normal[0];
                if n > 0.0 {
                    (offset / n, f64::INFINITY)
                } else if n < 0.0 {
                    (f64::NEG_INFINITY, offset / n)
                } else if *offset < 0.0 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    (0.0, 0.0)
                }
            }
            Region::Ball { center, radius } => (center[0] - radius, center[0] + radius),
            Region::Box { lo, hi } => (lo[0], hi[0]),
        }
    }

    fn dim_ok(&self, dim: usize) -> bool {
        match self {
            Region::HalfSpace { normal, .. } => normal.len() == dim,
            Region::Ball { center, radius } => center.len() == dim && *radius > 0.0,
            Region::Box { lo, hi } => lo.len() == dim && hi.len() == dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRegion {
    pub region: Region,
    pub value: f64,
}

/// Piecewise-constant weight `beta : R^n \ Omega -> [0, 1]`.
///
/// The first listed region containing a point decides its value; points in
/// no region take `default`. The weight is never consulted inside the
/// domain, where it is zero by definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobinWeight {
    #[serde(default)]
    pub regions: Vec<WeightRegion>,
    pub default: f64,
}

impl RobinWeight {
    pub fn uniform(value: f64) -> Result<Self> {
        let w = RobinWeight { regions: Vec::new(), default: value };
        w.validate(1)?;
        Ok(w)
    }

    /// `beta = 0`: homogeneous nonlocal Neumann.
    pub fn neumann() -> Self {
        RobinWeight { regions: Vec::new(), default: 0.0 }
    }

    /// `beta = 1` outside: the characteristic-function case.
    pub fn dirichlet() -> Self {
        RobinWeight { regions: Vec::new(), default: 1.0 }
    }

    /// `beta = 1` on `{normal . z > offset}`, 0 elsewhere outside.
    pub fn one_sided(normal: Vec<f64>, offset: f64) -> Self {
        RobinWeight {
            regions: vec![WeightRegion {
                region: Region::HalfSpace { normal, offset },
                value: 1.0,
            }],
            default: 0.0,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let in_range = |v: f64| (0.0..=1.0).contains(&v);
        if !in_range(self.default) || self.regions.iter().any(|r| !in_range(r.value)) {
            return Err(Error::InvalidParameter("weight values must lie in [0, 1]".into()));
        }
        if let Some(r) = self.regions.iter().find(|r| !r.region.dim_ok(dim)) {
            return Err(Error::InvalidParameter(format!(
                "weight region {:?} does not match dimension {dim}",
                r.region
            )));
        }
        Ok(())
    }

    pub fn value(&self, z: &Point) -> f64 {
        self.regions
            .iter()
            .find(|r| r.region.contains(z))
            .map_or(self.default, |r| r.value)
    }

    /// `Some(v)` when the weight is the constant `v` everywhere outside.
    pub fn as_uniform(&self) -> Option<f64> {
        if self.regions.is_empty() {
            Some(self.default)
        } else {
            None
        }
    }

    pub fn is_identically(&self, v: f64) -> bool {
        self.as_uniform() == Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_evaluate() {
        let p = Point::d1(0.5);
        assert_eq!(FieldRule::poly1d(&[0.0, 0.0, 1.0]).eval(&p), 0.25);
        assert_eq!(FieldRule::cos1d(1.0).eval(&Point::d1(0.0)), 1.0);
        let bump = FieldRule::PowerBump { center: vec![0.0], radius: 1.0, exponent: 0.5 };
        assert!((bump.eval(&p) - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(bump.eval(&Point::d1(1.5)), 0.0);
        let q = FieldRule::Polynomial {
            terms: vec![Monomial { coef: 2.0, powers: vec![1, 2] }],
        };
        assert_eq!(q.eval(&Point::d2(3.0, 2.0)), 24.0);
    }

    #[test]
    fn smoothness_classes() {
        assert_eq!(FieldRule::poly1d(&[3.0]).smoothness(), Smoothness::Constant);
        assert_eq!(FieldRule::poly1d(&[0.0, 1.0]).smoothness(), Smoothness::Polynomial);
        assert_eq!(FieldRule::cos1d(2.0).smoothness(), Smoothness::Trigonometric);
    }

    #[test]
    fn weight_first_region_wins() {
        let w = RobinWeight {
            regions: vec![
                WeightRegion {
                    region: Region::Box { lo: vec![1.0], hi: vec![2.0] },
                    value: 0.25,
                },
                WeightRegion {
                    region: Region::HalfSpace { normal: vec![1.0], offset: 1.0 },
                    value: 1.0,
                },
            ],
            default: 0.0,
        };
        assert_eq!(w.value(&Point::d1(1.5)), 0.25);
        assert_eq!(w.value(&Point::d1(3.0)), 1.0);
        assert_eq!(w.value(&Point::d1(-3.0)), 0.0);
        assert!(w.validate(1).is_ok());
        assert!(RobinWeight::uniform(1.5).is_err());
    }

    #[test]
    fn bounded_on_grid() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let m = FieldRule::poly1d(&[0.0, 0.0, 1.0]).sup_on_grid(&d, 200);
        assert!(m <= 1.0 && m > 0.98);
    }
}
