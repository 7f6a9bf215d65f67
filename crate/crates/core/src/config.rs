//! TOML run configuration for the command-line front end.
//!
//! ```toml
//! seed = 7
//!
//! [domain]
//! shape = "interval"
//! a = -1.0
//! b = 1.0
//!
//! [order]
//! s = 0.5
//!
//! [[fields]]
//! name = "quadratic"
//! rule = { kind = "polynomial", terms = [{ coef = 1.0, powers = [2] }] }
//! exterior = { kind = "robin", weight = "neumann" }
//!
//! [[weights]]
//! name = "neumann"
//! default = 0.0
//!
//! [laplacian]
//! field = "quadratic"
//! grid = { line = { from = [-0.9], to = [0.9], count = 19 } }
//! ```
//!
//! Every table rejects unknown keys. Fields and weights are referenced by
//! name from the command sections; names are resolved in [`RunConfig::validate`].

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldRule, RobinWeight, ScalarField, WeightRegion};
use crate::geometry::{Domain, Point};
use crate::quadrature::QuadratureSpec;
use crate::verify::Fault;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid config at `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSpec {
    /// Dimension; defaults to that of the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub s: f64,
}

/// Exterior continuation of a named field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExteriorSpec {
    Explicit,
    Zero,
    /// Robin extension with a weight referenced by name.
    Robin { weight: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    pub rule: FieldRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exterior: Option<ExteriorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<WeightRegion>,
    pub default: f64,
}

impl WeightSpec {
    pub fn weight(&self) -> RobinWeight {
        RobinWeight { regions: self.regions.clone(), default: self.default }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub count: usize,
}

/// A list of points: explicit coordinates, an evenly spaced segment
/// (endpoints included), or both, in that order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSet {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<LineSpec>,
}

impl PointSet {
    pub fn explicit(points: Vec<Vec<f64>>) -> Self {
        PointSet { points, line: None }
    }

    pub fn resolve(&self) -> crate::Result<Vec<Point>> {
        let mut out = self.points.iter().map(|c| Point::new(c)).collect::<crate::Result<Vec<_>>>()?;
        if let Some(l) = &self.line {
            if l.from.len() != l.to.len() {
                return Err(crate::Error::InvalidParameter("line endpoints differ in dimension".into()));
            }
            for i in 0..l.count {
                let t = if l.count == 1 { 0.0 } else { i as f64 / (l.count - 1) as f64 };
                let c: Vec<f64> = l.from.iter().zip(&l.to).map(|(a, b)| a + t * (b - a)).collect();
                out.push(Point::new(&c)?);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplacianSection {
    pub field: String,
    #[serde(default)]
    pub grid: PointSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub weight: String,
    #[serde(default)]
    pub xs: PointSet,
    #[serde(default)]
    pub ys: PointSet,
    /// Threshold of the lower envelope, in (0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

/// One verification check. `s` overrides the run's order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    Theorem {
        field: String,
        weight: String,
        points: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    Corollary {
        field: String,
        points: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    SecondForm {
        field: String,
        weight: String,
        points: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    Fubini {
        field: String,
        weight: String,
        point: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    MassBounds {
        distances: Vec<f64>,
        ratio_bound: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    LogBounds {
        x: Vec<f64>,
        weight: String,
        distances: Vec<f64>,
        eps: f64,
        window: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    LogSlopes {
        x: Vec<f64>,
        weight: String,
        distances: Vec<f64>,
        ratio_bound: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    KernelSymmetry {
        weight: String,
        pairs: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
}

impl CheckSpec {
    pub fn s(&self) -> Option<f64> {
        match self {
            CheckSpec::Theorem { s, .. }
            | CheckSpec::Corollary { s, .. }
            | CheckSpec::SecondForm { s, .. }
            | CheckSpec::Fubini { s, .. }
            | CheckSpec::MassBounds { s, .. }
            | CheckSpec::LogBounds { s, .. }
            | CheckSpec::LogSlopes { s, .. }
            | CheckSpec::KernelSymmetry { s, .. } => *s,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::Theorem { .. } => "theorem",
            CheckSpec::Corollary { .. } => "corollary",
            CheckSpec::SecondForm { .. } => "second_form",
            CheckSpec::Fubini { .. } => "fubini",
            CheckSpec::MassBounds { .. } => "mass_bounds",
            CheckSpec::LogBounds { .. } => "log_bounds",
            CheckSpec::LogSlopes { .. } => "log_slopes",
            CheckSpec::KernelSymmetry { .. } => "kernel_symmetry",
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            CheckSpec::Theorem { field, .. }
            | CheckSpec::Corollary { field, .. }
            | CheckSpec::SecondForm { field, .. }
            | CheckSpec::Fubini { field, .. } => Some(field),
            _ => None,
        }
    }

    pub fn weight(&self) -> Option<&str> {
        match self {
            CheckSpec::Theorem { weight, .. }
            | CheckSpec::SecondForm { weight, .. }
            | CheckSpec::Fubini { weight, .. }
            | CheckSpec::LogBounds { weight, .. }
            | CheckSpec::LogSlopes { weight, .. }
            | CheckSpec::KernelSymmetry { weight, .. } => Some(weight),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixCheck {
    Theorem,
    SecondForm,
    Corollary,
}

/// Cartesian product fields x weights x orders, expanded into checks.
/// Corollary entries ignore the weight axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub fields: Vec<String>,
    pub weights: Vec<String>,
    pub s: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub checks: Vec<MatrixCheck>,
}

impl MatrixSpec {
    pub fn expand(&self) -> Vec<CheckSpec> {
        let mut out = Vec::new();
        for &s in &self.s {
            for field in &self.fields {
                for check in &self.checks {
                    let (field, points, s) = (field.clone(), self.points.clone(), Some(s));
                    match check {
                        MatrixCheck::Corollary => out.push(CheckSpec::Corollary { field, points, s }),
                        MatrixCheck::Theorem => out.extend(self.weights.iter().map(|w| CheckSpec::Theorem {
                            field: field.clone(),
                            weight: w.clone(),
                            points: points.clone(),
                            s,
                        })),
                        MatrixCheck::SecondForm => out.extend(self.weights.iter().map(|w| CheckSpec::SecondForm {
                            field: field.clone(),
                            weight: w.clone(),
                            points: points.clone(),
                            s,
                        })),
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultSpec {
    #[default]
    None,
    KernelSignFlip,
}

impl FaultSpec {
    pub fn fault(self) -> Option<Fault> {
        match self {
            FaultSpec::None => None,
            FaultSpec::KernelSignFlip => Some(Fault::KernelSignFlip),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default, skip_serializing_if = "is_default")]
    pub fault_injection: FaultSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
}

impl VerifySection {
    /// Explicit checks followed by the expanded matrix.
    pub fn all_checks(&self) -> Vec<CheckSpec> {
        let mut v = self.checks.clone();
        if let Some(m) = &self.matrix {
            v.extend(m.expand());
        }
        v
    }
}

/// TOML integers are signed 64-bit, so larger seeds would not round-trip.
pub fn check_seed(field: &str, seed: u64) -> Result<(), ConfigError> {
    if seed > i64::MAX as u64 {
        return Err(invalid(field, format!("seed {seed} exceeds 2^63 - 1")));
    }
    Ok(())
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub field: String,
    pub points: Vec<Vec<f64>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_max_se")]
    pub max_std_error: f64,
    /// Agreement window in standard errors.
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
}

fn default_samples() -> usize {
    100_000
}
fn default_max_se() -> f64 {
    0.05
}
fn default_sigmas() -> f64 {
    3.0
}
fn default_bins() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub particles: usize,
    pub steps: usize,
    pub start: Vec<f64>,
    /// Smallest jump; defaults to `1e-3 * diameter`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Largest jump; defaults to `10 * diameter`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_jump: Option<f64>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub domain: Domain,
    pub order: OrderSpec,
    #[serde(default, skip_serializing_if = "is_default")]
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<WeightSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laplacian: Option<LaplacianSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are always representable in TOML")
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn weight(&self, name: &str) -> Result<RobinWeight, ConfigError> {
        self.weights
            .iter()
            .find(|w| w.name == name)
            .map(WeightSpec::weight)
            .ok_or_else(|| invalid(format!("weights.{name}"), "no weight with this name"))
    }

    pub fn field_spec(&self, name: &str) -> Result<&FieldSpec, ConfigError> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| invalid(format!("fields.{name}"), "no field with this name"))
    }

    /// The named field with its exterior rule resolved.
    pub fn field(&self, name: &str) -> Result<ScalarField, ConfigError> {
        let spec = self.field_spec(name)?;
        Ok(match &spec.exterior {
            None => ScalarField::interior_only(spec.rule.clone()),
            Some(ExteriorSpec::Explicit) => ScalarField::explicit(spec.rule.clone()),
            Some(ExteriorSpec::Zero) => ScalarField {
                rule: spec.rule.clone(),
                exterior: Some(crate::field::ExteriorRule::Zero),
            },
            Some(ExteriorSpec::Robin { weight }) => ScalarField::robin(spec.rule.clone(), self.weight(weight)?),
        })
    }

    /// Every order used anywhere in the config, in first-use order.
    pub fn orders(&self) -> Vec<f64> {
        let mut out = vec![self.order.s];
        if let Some(v) = &self.verify {
            for c in v.all_checks() {
                if let Some(s) = c.s() {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_seed("seed", self.seed)?;
        self.domain.validate().map_err(|e| invalid("domain", e))?;
        let dim = self.dim();
        if let Some(n) = self.order.n {
            if n != dim {
                return Err(invalid("order.n", format!("{n} does not match the {dim}-dimensional domain")));
            }
        }
        for s in self.orders() {
            if !(s > 0.0 && s < 1.0) {
                return Err(invalid("order.s", format!("s = {s} outside (0, 1)")));
            }
        }
        self.quadrature.validate().map_err(|e| invalid("quadrature", e))?;

        let mut names = BTreeSet::new();
        for w in &self.weights {
            if !names.insert(&w.name) {
                return Err(invalid(format!("weights.{}", w.name), "duplicate name"));
            }
            w.weight().validate(dim).map_err(|e| invalid(format!("weights.{}", w.name), e))?;
        }
        let mut names = BTreeSet::new();
        for f in &self.fields {
            if !names.insert(&f.name) {
                return Err(invalid(format!("fields.{}", f.name), "duplicate name"));
            }
            f.rule.validate(dim).map_err(|e| invalid(format!("fields.{}.rule", f.name), e))?;
            self.field(&f.name)?;
        }

        let point = |ctx: &str, c: &[f64]| -> Result<(), ConfigError> {
            if c.len() != dim {
                return Err(invalid(ctx, format!("point {c:?} is not {dim}-dimensional")));
            }
            Ok(())
        };
        let set = |ctx: &str, p: &PointSet| -> Result<(), ConfigError> {
            p.points.iter().try_for_each(|c| point(ctx, c))?;
            if let Some(l) = &p.line {
                point(ctx, &l.from)?;
                point(ctx, &l.to)?;
            }
            Ok(())
        };

        if let Some(l) = &self.laplacian {
            self.field_spec(&l.field)?;
            set("laplacian.grid", &l.grid)?;
        }
        if let Some(k) = &self.kernel {
            self.weight(&k.weight)?;
            set("kernel.xs", &k.xs)?;
            set("kernel.ys", &k.ys)?;
            if let Some(eps) = k.eps {
                if !(eps > 0.0 && eps <= 1.0) {
                    return Err(invalid("kernel.eps", format!("{eps} outside (0, 1]")));
                }
            }
        }
        if let Some(v) = &self.verify {
            if let Some(m) = &v.matrix {
                m.fields.iter().try_for_each(|f| self.field_spec(f).map(|_| ()))?;
                m.weights.iter().try_for_each(|w| self.weight(w).map(|_| ()))?;
                m.points.iter().try_for_each(|c| point("verify.matrix.points", c))?;
            }
            for (i, c) in v.checks.iter().enumerate() {
                let ctx = format!("verify.checks[{i}]");
                if let Some(f) = c.field() {
                    self.field_spec(f)?;
                }
                if let Some(w) = c.weight() {
                    self.weight(w)?;
                }
                match c {
                    CheckSpec::Theorem { points, .. }
                    | CheckSpec::Corollary { points, .. }
                    | CheckSpec::SecondForm { points, .. } => points.iter().try_for_each(|p| point(&ctx, p))?,
                    CheckSpec::Fubini { point: p, .. } => point(&ctx, p)?,
                    CheckSpec::LogBounds { x, .. } | CheckSpec::LogSlopes { x, .. } => point(&ctx, x)?,
                    CheckSpec::KernelSymmetry { seed: Some(seed), .. } => check_seed(&ctx, *seed)?,
                    _ => {}
                }
            }
        }
        if let Some(sim) = &self.simulate {
            point("simulate.start", &sim.start)?;
            if sim.particles == 0 {
                return Err(invalid("simulate.particles", "must be at least 1"));
            }
            if let Some(g) = &sim.generator {
                self.field_spec(&g.field)?;
                g.points.iter().try_for_each(|p| point("simulate.generator.points", p))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 3

[domain]
shape = "interval"
a = -1.0
b = 1.0

[order]
s = 0.5

[[weights]]
name = "neumann"
default = 0.0

[[weights]]
name = "right"
default = 0.0
regions = [{ region = { type = "half_space", normal = [1.0], offset = 0.0 }, value = 1.0 }]

[[fields]]
name = "quadratic"
rule = { kind = "polynomial", terms = [{ coef = 1.0, powers = [2] }] }
exterior = { kind = "robin", weight = "neumann" }

[[fields]]
name = "cosine"
rule = { kind = "trigonometric", amplitude = 1.0, wavevector = [1.0], phase = 0.0 }
exterior = { kind = "explicit" }

[laplacian]
field = "cosine"
grid = { points = [[0.0]], line = { from = [-0.5], to = [0.5], count = 3 } }

[verify]
fault_injection = "kernel_sign_flip"
checks = [{ kind = "mass_bounds", distances = [0.1, 1.0], ratio_bound = 100.0 }]

[verify.matrix]
fields = ["quadratic", "cosine"]
weights = ["neumann", "right"]
s = [0.25, 0.75]
points = [[0.0]]
checks = ["theorem", "corollary"]
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.laplacian.as_ref().unwrap().grid.resolve().unwrap().len(), 4);
        let once = cfg.to_toml();
        let again = RunConfig::parse(&once).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), once);
    }

    #[test]
    fn matrix_expands_in_order() {
        let cfg = RunConfig::parse(SAMPLE).unwrap();
        let v = cfg.verify.as_ref().unwrap();
        assert_eq!(v.fault_injection.fault(), Some(Fault::KernelSignFlip));
        let checks = v.all_checks();
        // 1 explicit + 2 orders * 2 fields * (2 theorem + 1 corollary)
        assert_eq!(checks.len(), 13);
        assert_eq!(checks[0].kind(), "mass_bounds");
        assert_eq!(checks[1].kind(), "theorem");
        assert_eq!(checks[3].kind(), "corollary");
        assert_eq!(cfg.orders(), vec![0.5, 0.25, 0.75]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SAMPLE.replace("seed = 3", "seed = 3\ncolour = 1");
        assert!(matches!(RunConfig::parse(&bad), Err(ConfigError::Parse(_))));
        let bad = SAMPLE.replace("default = 0.0\n\n[[weights]]", "default = 0.0\nextra = 1\n\n[[weights]]");
        assert!(matches!(RunConfig::parse(&bad), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn parse_errors_carry_location() {
        let bad = SAMPLE.replace("s = 0.5", "s = \"half\"");
        let msg = RunConfig::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn unresolved_names_and_bad_orders_fail_validation() {
        let bad = SAMPLE.replace("field = \"cosine\"", "field = \"sine\"");
        match RunConfig::parse(&bad) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "fields.sine"),
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("s = [0.25, 0.75]", "s = [0.25, 1.5]");
        assert!(matches!(RunConfig::parse(&bad), Err(ConfigError::Invalid { .. })));
        let bad = SAMPLE.replace("points = [[0.0]]\nchecks", "points = [[0.0, 1.0]]\nchecks");
        assert!(matches!(RunConfig::parse(&bad), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn minimal_config_is_enough() {
        let cfg = RunConfig::parse("[domain]\nshape = \"ball\"\ncenter = [0.0, 0.0]\nradius = 1.0\n[order]\ns = 0.3\n").unwrap();
        assert_eq!(cfg.dim(), 2);
        assert!(cfg.verify.is_none());
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
