//! Pluggable clean-latent predictors.
//!
//! The reverse sampler needs an estimate of the clean latent from a noisy
//! observation at a known noise level. Trained networks can be attached
//! through the [`DenoisePredictor`] trait; the crate ships the closed-form
//! posterior-mean predictor for Gaussian priors as a verification oracle:
//! for a prior `N(0, S)` and `x_t = sqrt(1-b) x_0 + sqrt(b) n`,
//!
//! ```text
//! x0_hat = sqrt(1-b) * S * ((1-b) S + b I)^{-1} * x_t
//! ```
//!
//! which for `S = I` collapses to `sqrt(1-b) * x_t`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::complex::{real_chol_solve, real_spd_cholesky};

/// Estimator of the clean latent given a noisy one and its noise level.
/// Implementations must be deterministic and safe for concurrent read-only
/// use.
pub trait DenoisePredictor: Send + Sync {
    /// Predict the clean latent from `noisy` observed at cumulative noise
    /// variance `beta_bar`.
    fn predict_clean(&self, noisy: &[f64], beta_bar: f64) -> Vec<f64>;
}

/// Shared handle to a predictor.
pub type PredictorHandle = Arc<dyn DenoisePredictor>;

/// Prior covariance of the Gaussian posterior-mean predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorCovariance {
    /// `S = I`: white unit-variance prior.
    Identity,
    /// Toeplitz AR(1) covariance `S[i][j] = rho^|i-j|`.
    Ar1 { rho: f64 },
}

/// Exact posterior-mean predictor for a zero-mean Gaussian prior.
#[derive(Debug, Clone)]
pub struct GaussianMmsePredictor {
    cov: PriorCovariance,
}

impl GaussianMmsePredictor {
    pub fn new(cov: PriorCovariance) -> Result<Self> {
        if let PriorCovariance::Ar1 { rho } = cov {
            if !(-1.0 < rho && rho < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "AR(1) prior needs rho in (-1, 1), got {rho}"
                )));
            }
        }
        Ok(GaussianMmsePredictor { cov })
    }

    pub fn identity() -> Self {
        GaussianMmsePredictor { cov: PriorCovariance::Identity }
    }

    pub fn covariance(&self) -> PriorCovariance {
        self.cov
    }
}

impl DenoisePredictor for GaussianMmsePredictor {
    fn predict_clean(&self, noisy: &[f64], beta_bar: f64) -> Vec<f64> {
        let keep = (1.0 - beta_bar).max(0.0);
        match self.cov {
            PriorCovariance::Identity => {
                let s = keep.sqrt();
                noisy.iter().map(|x| s * x).collect()
            }
            PriorCovariance::Ar1 { rho } => {
                if beta_bar == 0.0 {
                    return noisy.to_vec();
                }
                let n = noisy.len();
                // M = (1-b) S + b I, solve M u = x, return sqrt(1-b) S u
                let mut m = vec![vec![0.0f64; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        let s = rho.powi((i as i32 - j as i32).abs());
                        m[i][j] = keep * s + if i == j { beta_bar } else { 0.0 };
                    }
                }
                let l = real_spd_cholesky(&m).expect("posterior system is SPD");
                let u = real_chol_solve(&l, noisy);
                let mut out = vec![0.0f64; n];
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, uj) in u.iter().enumerate() {
                        acc += rho.powi((i as i32 - j as i32).abs()) * uj;
                    }
                    out[i] = keep.sqrt() * acc;
                }
                out
            }
        }
    }
}

/// Predictor that always returns zero; the prior mean with no information.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPredictor;

impl DenoisePredictor for ZeroPredictor {
    fn predict_clean(&self, noisy: &[f64], _beta_bar: f64) -> Vec<f64> {
        vec![0.0; noisy.len()]
    }
}
