//! Statistical test primitives: Kolmogorov-Smirnov distance against the
//! standard normal, sample autocovariance, and excess kurtosis. These back
//! the quantitative Gaussianity diagnostics for shuffled interference.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Exact sup-distance between the empirical CDF of `samples` and the
/// standard normal CDF. Raw statistic only, no p-value machinery.
pub fn ks_normal(samples: &[f64]) -> Result<f64> {
    if samples.len() < 100 {
        return Err(Error::InsufficientData { needed: 100, got: samples.len() });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = normal_cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        sup = sup.max((hi - cdf).abs().max((cdf - lo).abs()));
    }
    Ok(sup)
}

/// Normalized sample autocovariance at lags `1..=max_lag` (lag 0 is
/// normalized to 1 and not returned). Uses the mean-removed estimator with
/// `1/(n-l)` scaling so deterministic patterns hit their exact values.
pub fn sample_autocov(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag == 0 || max_lag * 10 >= n {
        return Err(Error::InvalidConfig(format!(
            "max_lag must satisfy 1 <= max_lag < len/10 (len {n}, max_lag {max_lag})"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c0 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if !(c0 > 1e-20 * (1.0 + mean * mean)) {
        return Err(Error::DegenerateInput("constant series has no autocovariance".into()));
    }
    let mut out = Vec::with_capacity(max_lag);
    for l in 1..=max_lag {
        let mut s = 0.0;
        for i in 0..(n - l) {
            s += (x[i] - mean) * (x[i + l] - mean);
        }
        out.push(s / (n - l) as f64 / c0);
    }
    Ok(out)
}

/// Excess kurtosis `m4/m2^2 - 3` of the pooled samples.
pub fn excess_kurtosis(x: &[f64]) -> Result<f64> {
    if x.len() < 100 {
        return Err(Error::InsufficientData { needed: 100, got: x.len() });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    if !(m2 > 0.0) {
        return Err(Error::DegenerateInput("constant series has no kurtosis".into()));
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Quantitative normality summary of a pooled interference sample.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianityReport {
    /// KS sup-distance of the pooled elements against N(0,1).
    pub ks_statistic: f64,
    /// Largest |autocovariance| over lags 1..=L, averaged across vectors.
    pub max_abs_autocov: f64,
    /// Pooled excess kurtosis.
    pub excess_kurtosis: f64,
    /// Number of pooled scalar samples.
    pub sample_count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;

    #[test]
    fn ks_on_standard_normal_is_small() {
        let mut rng = RngStream::new(11, 0);
        let x = rng.normal_vec(1_000_000);
        let ks = ks_normal(&x).unwrap();
        assert!(ks < 0.002, "ks = {ks}");
    }

    #[test]
    fn ks_point_mass_at_zero() {
        let x = vec![0.0; 1000];
        let ks = ks_normal(&x).unwrap();
        assert!((ks - 0.5).abs() < 1e-12, "ks = {ks}");
    }

    #[test]
    fn ks_uniform_has_visible_gap() {
        let mut rng = RngStream::new(12, 0);
        use rand::Rng;
        let x: Vec<f64> = (0..1_000_000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ks = ks_normal(&x).unwrap();
        assert!(ks > 0.05, "ks = {ks}");
    }

    #[test]
    fn ks_needs_enough_samples() {
        assert!(matches!(
            ks_normal(&[0.0; 99]),
            Err(Error::InsufficientData { needed: 100, got: 99 })
        ));
    }

    #[test]
    fn autocov_iid_is_near_zero() {
        let mut rng = RngStream::new(13, 0);
        let x = rng.normal_vec(100_000);
        let ac = sample_autocov(&x, 10).unwrap();
        for (l, v) in ac.iter().enumerate() {
            assert!(v.abs() < 0.02, "lag {} autocov {}", l + 1, v);
        }
    }

    #[test]
    fn autocov_ar1_matches_theory() {
        let mut rng = RngStream::new(14, 0);
        let rho = 0.9f64;
        let n = 100_000;
        let mut x = Vec::with_capacity(n);
        let mut prev = rng.standard_normal();
        x.push(prev);
        let w = (1.0 - rho * rho).sqrt();
        for _ in 1..n {
            prev = rho * prev + w * rng.standard_normal();
            x.push(prev);
        }
        let ac = sample_autocov(&x, 1).unwrap();
        assert!((0.88..=0.92).contains(&ac[0]), "lag-1 autocov {}", ac[0]);
    }

    #[test]
    fn autocov_alternating_is_minus_one() {
        let x: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ac = sample_autocov(&x, 2).unwrap();
        assert!((ac[0] + 1.0).abs() < 1e-6, "lag-1 {}", ac[0]);
        assert!((ac[1] - 1.0).abs() < 1e-6, "lag-2 {}", ac[1]);
    }

    #[test]
    fn autocov_rejects_constants_and_bad_lags() {
        assert!(matches!(sample_autocov(&[3.0; 1000], 5), Err(Error::DegenerateInput(_))));
        assert!(matches!(sample_autocov(&[1.0, 2.0, 3.0], 1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn kurtosis_of_normal_is_near_zero() {
        let mut rng = RngStream::new(15, 0);
        let x = rng.normal_vec(200_000);
        let k = excess_kurtosis(&x).unwrap();
        assert!(k.abs() < 0.1, "kurtosis {k}");
    }
}
