//! Small estimators used by the Monte Carlo experiments.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Binomial proportion with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    /// Standard error `sqrt(p(1-p)/n)` of the plug-in estimate.
    pub std_error: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl ProportionEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(trials > 0, "proportion needs at least one trial");
        assert!(successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let (lo, hi) = wilson_interval(successes, trials, Z95);
        Self {
            successes,
            trials,
            estimate: p,
            std_error: (p * (1.0 - p) / n).sqrt(),
            wilson_low: lo,
            wilson_high: hi,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.wilson_high - self.wilson_low)
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

/// Running mean and variance (Welford). Merging is exact up to rounding and
/// the harness always folds replicas in index order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanVar) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }

    /// Half-width of the two-sided 95% Student t interval for the mean.
    pub fn t_half_width(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let df = (self.n - 1) as f64;
        let t = StudentsT::new(0.0, 1.0, df)
            .map(|d| d.inverse_cdf(0.975))
            .unwrap_or(Z95);
        t * self.std_error()
    }
}

impl FromIterator<f64> for MeanVar {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanVar::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Empirical quantile with linear interpolation between order statistics
/// (type 7). `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
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

/// Asymptotic critical value of the two-sample KS statistic at level `alpha`:
/// `sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m))`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate_and_handles_zero() {
        let e = ProportionEstimate::new(0, 100);
        assert_eq!(e.wilson_low, 0.0);
        assert!(e.wilson_high > 0.0 && e.wilson_high < 0.05);
        let e = ProportionEstimate::new(50, 100);
        assert!(e.wilson_low < 0.5 && e.wilson_high > 0.5);
        assert!((e.std_error - 0.05).abs() < 1e-12);
    }

    #[test]
    fn meanvar_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64).sin() * 3.0 + 1.0).collect();
        let all: MeanVar = xs.iter().copied().collect();
        let mut left: MeanVar = xs[..37].iter().copied().collect();
        let right: MeanVar = xs[37..].iter().copied().collect();
        left.merge(&right);
        assert!((all.mean() - left.mean()).abs() < 1e-12);
        assert!((all.variance() - left.variance()).abs() < 1e-10);
    }

    #[test]
    fn t_interval_is_wider_than_normal() {
        let m: MeanVar = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert!(m.t_half_width() > Z95 * m.std_error());
    }

    #[test]
    fn ks_of_identical_and_disjoint_samples() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        assert_eq!(ks_two_sample(&a, &[10.0, 11.0]), 1.0);
        let c = ks_critical_value(10_000, 10_000, 0.01);
        assert!((c - 1.627_61 * (2.0e-4f64).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn quantiles_interpolate() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.5), 2.5);
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
    }
}
