//! Summary statistics, batch means, Kolmogorov-Smirnov distances and
//! least-squares fits.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Mean and batch-means standard error over `batches` contiguous batches.
pub fn batch_means(x: &[f64], batches: usize) -> (f64, f64) {
    let n = x.len();
    let m = mean(x);
    let b = batches.min(n).max(2);
    let size = n / b;
    if size == 0 {
        return (m, f64::NAN);
    }
    let bm: Vec<f64> = (0..b).map(|j| mean(&x[j * size..(j + 1) * size])).collect();
    let var = variance(&bm);
    (m, (var / b as f64).sqrt())
}

/// Largest single share of the total, for nonnegative samples.
pub fn max_share(x: &[f64]) -> f64 {
    let total: f64 = x.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    x.iter().cloned().fold(0.0, f64::max) / total
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted(a);
    let b = sorted(b);
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

/// One-sample Kolmogorov-Smirnov distance against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(x: &[f64], cdf: F) -> f64 {
    let x = sorted(x);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let f = cdf(v);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Asymptotic Kolmogorov tail probability `P(K > lambda)`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        let t = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-17 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Ordinary least squares `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    LinearFit { slope, intercept, r_squared }
}

/// A distributional check outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsRecord {
    pub test: String,
    pub n: usize,
    pub ks: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl KsRecord {
    pub fn new(test: impl Into<String>, n: usize, ks: f64, threshold: f64) -> Self {
        KsRecord { test: test.into(), n, ks, threshold, pass: ks < threshold }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_is_exact_on_affine_data() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.7).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 7.0).collect();
        let f = linear_fit(&x, &y);
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 7.0).abs() < 1e-13);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ks_identical_samples() {
        let a = vec![0.1, 0.5, 0.9, 1.3];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b = vec![10.0, 11.0];
        assert_eq!(ks_two_sample(&a, &b), 1.0);
    }

    #[test]
    fn ks_with_ties() {
        let a = vec![1.0, 1.0, 2.0, 2.0];
        let b = vec![1.0, 2.0];
        assert_eq!(ks_two_sample(&a, &b), 0.0);
    }

    #[test]
    fn ks_one_sample_uniform_grid() {
        let x: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_one_sample(&x, |v| v) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn batch_means_constant() {
        let x = vec![3.0; 200];
        let (m, se) = batch_means(&x, 20);
        assert_eq!(m, 3.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn kolmogorov_tail_known_point() {
        assert!((kolmogorov_tail(1.358) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn normal_cdf_symmetry() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.0) + normal_cdf(-1.0) - 1.0).abs() < 1e-15);
    }
}
