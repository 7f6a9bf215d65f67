//! Closed-form and brute-force reference values, computed independently of
//! the library's quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;

use nonlocal_robin::{Domain, FieldRule, Point, QuadratureSpec, RobinWeight};
use statrs::function::gamma::gamma;

pub fn interval() -> Domain {
    Domain::interval(-1.0, 1.0).unwrap()
}

pub fn p1(x: f64) -> Point {
    Point::new(&[x]).unwrap()
}

pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

pub const ORDERS: [f64; 3] = [0.25, 0.5, 0.75];

/// The three test fields y^2, cos y and 1.
pub fn fields() -> Vec<(&'static str, FieldRule)> {
    vec![
        ("y^2", FieldRule::poly1d(&[0.0, 0.0, 1.0])),
        ("cos", FieldRule::cos1d(1.0)),
        ("1", FieldRule::constant(1.0)),
    ]
}

/// beta = 0, beta = 1 right of the domain only, beta = 1.
pub fn weights() -> Vec<(&'static str, RobinWeight)> {
    vec![
        ("beta=0", RobinWeight::neumann()),
        ("beta=1 right", RobinWeight::one_sided(vec![1.0], 0.0)),
        ("beta=1", RobinWeight::dirichlet()),
    ]
}

pub const POINTS: [f64; 5] = [-0.6, -0.25, 0.0, 0.3, 0.65];

/// `c_{1,s} = 4^s Gamma(1/2 + s) / (sqrt(pi) |Gamma(-s)|)`.
pub fn c1(s: f64) -> f64 {
    4f64.powf(s) * gamma(0.5 + s) / (PI.sqrt() * gamma(-s).abs())
}

/// `int_a^b |z - t|^{-1-2s} dt` by antiderivative, `z` outside `[a, b]`.
pub fn interval_mass(a: f64, b: f64, s: f64, z: f64) -> f64 {
    let g = |t: f64| t.powf(-2.0 * s) / (2.0 * s);
    if z > b {
        g(z - b) - g(z - a)
    } else {
        g(a - z) - g(b - z)
    }
}

/// Same integral by a composite midpoint rule on a graded mesh, as a
/// cross-check of the antiderivative.
pub fn interval_mass_brute(a: f64, b: f64, s: f64, z: f64, n: usize) -> f64 {
    // grade towards the endpoint nearest z
    let near = if z > b { b } else { a };
    let far = if z > b { a } else { b };
    let mut sum = 0.0;
    for i in 0..n {
        let u0 = (i as f64 / n as f64).powi(3);
        let u1 = ((i + 1) as f64 / n as f64).powi(3);
        let t0 = near + (far - near) * u0;
        let t1 = near + (far - near) * u1;
        let tm = 0.5 * (t0 + t1);
        sum += (t1 - t0).abs() * (z - tm).abs().powf(-1.0 - 2.0 * s);
    }
    sum
}

/// CDF of the return point on (-1, 1) from z = 2 when s = 1/2:
/// `int_{-1}^y (2 - t)^{-2} dt / (2/3)`.
pub fn return_cdf_z2(y: f64) -> f64 {
    ((1.0 / (2.0 - y) - 1.0 / 3.0) / (2.0 / 3.0)).clamp(0.0, 1.0)
}

/// `D^s` of `(1 - y^2)_+^s` on the line: `4^s Gamma(1 + s) Gamma(1/2 + s) / Gamma(1/2)`.
pub fn torsion_constant(s: f64) -> f64 {
    4f64.powf(s) * gamma(1.0 + s) * gamma(0.5 + s) / gamma(0.5)
}

/// `D^s` of the exterior indicator of (-1, 1) at interior `x`:
/// `-c_{1,s} ((1 - x)^{-2s} + (1 + x)^{-2s}) / (2s)`.
pub fn indicator_term(s: f64, x: f64) -> f64 {
    -c1(s) * ((1.0 - x).powf(-2.0 * s) + (1.0 + x).powf(-2.0 * s)) / (2.0 * s)
}

/// Log-spaced ladder from `10^lo` to `10^hi` with `count` points.
pub fn log_ladder(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (count - 1) as f64))
        .collect()
}
