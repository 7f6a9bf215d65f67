//! Property-based invariants.

mod common;

use common::*;
use nonlocal_robin::config::RunConfig;
use nonlocal_robin::montecarlo::{resurrection_cdf_1d, sample_resurrection, stream_rng};
use nonlocal_robin::stats::{ks_statistic, Histogram};
use nonlocal_robin::{Domain, FieldRule, FractionalOrder, Operators, Point, QuadratureSpec, RobinWeight, ScalarField};
use proptest::prelude::*;

fn ops(s: f64) -> Operators {
    Operators::new(interval(), s, QuadratureSpec::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mass_matches_antiderivative_and_decreases(s in 0.05f64..0.95, d in 1e-4f64..50.0, left in any::<bool>()) {
        let o = ops(s);
        let z = if left { -1.0 - d } else { 1.0 + d };
        let m = o.mass_integral(&p1(z)).unwrap();
        let want = interval_mass(-1.0, 1.0, s, z);
        prop_assert!((m / want - 1.0).abs() < 1e-12);
        let further = o.mass_integral(&p1(if left { z - 0.1 } else { z + 0.1 })).unwrap();
        prop_assert!(further < m);
    }

    #[test]
    fn robin_extension_preserves_constants(s in 0.1f64..0.9, d in 1e-3f64..10.0, beta in 0.0f64..1.0, c in -5.0f64..5.0) {
        let o = ops(s);
        let w = RobinWeight::uniform(beta).unwrap();
        let z = p1(1.0 + d);
        let v = o.robin_extension(&FieldRule::constant(c), &w, &z).unwrap();
        // beta u + (1 - beta)(u - c) = 0  =>  u = (1 - beta) c
        prop_assert!((v - (1.0 - beta) * c).abs() < 1e-10 * (1.0 + c.abs()));
    }

    #[test]
    fn weighted_average_is_within_field_range(s in 0.1f64..0.9, d in 1e-4f64..10.0, k in 0.5f64..4.0) {
        let o = ops(s);
        let v = o.weighted_average(&FieldRule::cos1d(k), &p1(-1.0 - d)).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&v));
    }

    #[test]
    fn resurrection_cdf_is_a_cdf(s in 0.05f64..0.95, d in 1e-6f64..100.0, y0 in -1.0f64..1.0, y1 in -1.0f64..1.0) {
        let z = 1.0 + d;
        let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
        let (f0, f1) = (resurrection_cdf_1d(-1.0, 1.0, s, z, lo), resurrection_cdf_1d(-1.0, 1.0, s, z, hi));
        prop_assert!((0.0..=1.0).contains(&f0) && f0 <= f1 + 1e-15);
        prop_assert!(resurrection_cdf_1d(-1.0, 1.0, s, z, -1.0) == 0.0);
        prop_assert!((resurrection_cdf_1d(-1.0, 1.0, s, z, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resurrection_lands_inside(seed in any::<u64>(), s in 0.05f64..0.95, r in 1.0001f64..20.0, th in 0.0f64..6.283) {
        let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let ord = FractionalOrder::new(2, s).unwrap();
        let z = Point::new(&[r * th.cos(), r * th.sin()]).unwrap();
        let mut rng = stream_rng(seed, 0);
        for _ in 0..20 {
            let y = sample_resurrection(&z, &dom, &ord, &mut rng).unwrap();
            prop_assert!(dom.contains(&y).unwrap());
        }
    }

    #[test]
    fn ks_statistic_is_bounded(xs in prop::collection::vec(0.0f64..1.0, 1..200)) {
        let d = ks_statistic(&xs, |u| u);
        prop_assert!(d > 0.0 && d <= 1.0);
    }

    #[test]
    fn histogram_conserves_counts(xs in prop::collection::vec(-10.0f64..10.0, 0..300), bins in 1usize..40) {
        let mut h = Histogram::uniform(-1.0, 1.0, bins);
        xs.iter().for_each(|&x| h.add(x));
        prop_assert_eq!(h.total(), xs.len() as u64);
    }

    #[test]
    fn config_round_trips(seed in 0..=i64::MAX as u64, s in 0.01f64..0.99, a in -5.0f64..0.0, len in 0.1f64..5.0) {
        let text = format!("seed = {seed}\n[domain]\nshape = \"interval\"\na = {a:?}\nb = {:?}\n[order]\ns = {s:?}\n", a + len);
        let cfg = RunConfig::parse(&text).unwrap();
        let once = cfg.to_toml();
        let again = RunConfig::parse(&once).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_toml(), once);
    }

    #[test]
    fn oversized_seeds_are_rejected(seed in (i64::MAX as u64 + 1)..=u64::MAX) {
        let text = format!("seed = {seed}\n[domain]\nshape = \"interval\"\na = -1.0\nb = 1.0\n[order]\ns = 0.5\n");
        prop_assert!(RunConfig::parse(&text).is_err());
        let mut cfg = RunConfig::parse("[domain]\nshape = \"interval\"\na = -1.0\nb = 1.0\n[order]\ns = 0.5\n").unwrap();
        cfg.seed = seed;
        prop_assert!(cfg.validate().is_err());
    }
}

proptest! {
    // kernel and full-operator evaluations are costlier; fewer cases
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_is_symmetric_and_nonnegative(s in 0.1f64..0.9, x in -0.9f64..0.9, y in -0.9f64..0.9, offset in -0.5f64..0.5) {
        let o = ops(s);
        let w = RobinWeight::one_sided(vec![1.0], offset);
        let a = o.kernel_value(&p1(x), &p1(y), &w).unwrap();
        let b = o.kernel_value(&p1(y), &p1(x), &w).unwrap();
        prop_assert!(a.value >= -10.0 * a.error);
        prop_assert!((a.value - b.value).abs() <= 10.0 * (a.error + b.error) + 1e-14);
    }

    #[test]
    fn fractional_laplacian_is_linear(s in 0.1f64..0.9, x in -0.8f64..0.8, amp in -3.0f64..3.0) {
        let o = ops(s);
        let base = o.fractional_laplacian(&ScalarField::explicit(FieldRule::cos1d(1.0)), &p1(x)).unwrap();
        let scaled = FieldRule::Trigonometric { amplitude: amp, wavevector: vec![1.0], phase: 0.0 };
        let v = o.fractional_laplacian(&ScalarField::explicit(scaled), &p1(x)).unwrap();
        prop_assert!((v.value - amp * base.value).abs() < 1e-8 * (1.0 + amp.abs()));
        // Fourier symbol |k|^{2s} with k = 1
        prop_assert!((base.value - x.cos()).abs() < 1e-8);
    }

    #[test]
    fn regional_operator_kills_constants(s in 0.1f64..0.9, x in -0.9f64..0.9, c in -4.0f64..4.0) {
        let o = ops(s);
        let v = o.regional_laplacian(&FieldRule::constant(c), &p1(x)).unwrap();
        prop_assert!(v.value.abs() < 1e-12);
    }

    #[test]
    fn identity_residual_within_tolerance(s in 0.15f64..0.85, x in -0.7f64..0.7, beta in 0.0f64..1.0) {
        let o = ops(s);
        let w = RobinWeight::uniform(beta).unwrap();
        let r = nonlocal_robin::verify::Verifier::new(&o)
            .verify_theorem_identity(&FieldRule::poly1d(&[0.0, 0.5, 1.0]), &w, &[p1(x)])
            .unwrap();
        prop_assert!(r.verdict.passed(), "{:?}", r);
    }
}
