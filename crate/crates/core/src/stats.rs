//! Small statistical helpers for the Monte Carlo checks.

use serde::Serialize;

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n - F|`.
///
/// Sorts a copy of `samples`; `cdf` must be nondecreasing with values in [0, 1].
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// KS statistic of values that should be Uniform(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    ks_statistic(values, |u| u.clamp(0.0, 1.0))
}

/// Two-sample KS statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of a KS statistic `d` at effective sample size `n`,
/// using the Stephens correction `lambda = (sqrt n + 0.12 + 0.11 / sqrt n) d`.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Welford accumulator for mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan's parallel merge. Deterministic for a fixed merge order.
    pub fn merge(&mut self, other: &RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Fixed-edge histogram. Values outside the edges are clamped into the end bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Self {
        let bins = bins.max(1);
        let edges = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
        Histogram { edges, counts: vec![0; bins] }
    }

    pub fn log_spaced(lo: f64, hi: f64, bins: usize) -> Self {
        let bins = bins.max(1);
        let (l, h) = (lo.log10(), hi.log10());
        let edges = (0..=bins)
            .map(|i| 10f64.powf(l + (h - l) * i as f64 / bins as f64))
            .collect();
        Histogram { edges, counts: vec![0; bins] }
    }

    pub fn bin_of(&self, x: f64) -> usize {
        let last = self.counts.len() - 1;
        // first edge strictly greater than x, minus one
        let i = self.edges.partition_point(|&e| e <= x);
        i.saturating_sub(1).min(last)
    }

    pub fn add(&mut self, x: f64) {
        let i = self.bin_of(x);
        self.counts[i] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_quantiles_is_half_step() {
        let n = 1000;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((ks_uniform(&v) - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_detects_shift() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 / 1000.0).powi(2)).collect();
        // F_n(x) = sqrt(x), sup |sqrt(x) - x| = 1/4
        assert!((ks_uniform(&v) - 0.25).abs() < 2e-3);
    }

    #[test]
    fn two_sample_identical_is_zero() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b: Vec<f64> = (50..150).map(|i| i as f64).collect();
        assert!((ks_two_sample(&a, &b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn p_value_reference_points() {
        // critical values of the Kolmogorov distribution
        assert!((ks_p_value(1.358 / 1e3, 1e6) - 0.05).abs() < 2e-3);
        assert!((ks_p_value(1.628 / 1e3, 1e6) - 0.01).abs() < 1e-3);
        assert_eq!(ks_p_value(0.0, 10.0), 1.0);
    }

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.3).collect();
        let mut all = RunningMoments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = RunningMoments::default();
        let mut b = RunningMoments::default();
        xs[..40].iter().for_each(|&x| a.push(x));
        xs[40..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count(), 100);
        assert!((a.mean() - all.mean()).abs() < 1e-12);
        assert!((a.variance() - all.variance()).abs() < 1e-12);
    }

    #[test]
    fn histogram_clamps_and_counts() {
        let mut h = Histogram::uniform(0.0, 1.0, 4);
        for x in [-1.0, 0.0, 0.3, 0.5, 0.99, 1.0, 7.0] {
            h.add(x);
        }
        assert_eq!(h.counts, vec![2, 1, 1, 3]);
        let g = Histogram::log_spaced(1e-3, 1e1, 4);
        assert!((g.edges[1] - 1e-2).abs() < 1e-15);
    }
}
