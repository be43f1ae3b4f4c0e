//! Synthetic semantic-latent sources.
//!
//! Stands in for the latent feature vectors a learned image encoder would
//! produce: real vectors of even length `2N` with unit per-element variance
//! by convention and a configurable internal correlation structure, so the
//! shuffle-Gaussianization claims can be tested against sources that are
//! i.i.d., serially correlated, block correlated, or heavy tailed.

mod semlat;

pub use semlat::{load_semlat, read_semlat, save_semlat, write_semlat, LatentBatch, SEMLAT_MAGIC};

use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::complex::real_spd_cholesky;
use crate::numerics::rng::RngStream;

/// Internal correlation structure of a generated latent vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LatentStructure {
    /// Independent standard normal elements.
    IidGaussian,
    /// Stationary first-order autoregression with coefficient `rho`.
    Ar1 { rho: f64 },
    /// Equicorrelated blocks of `block` consecutive elements.
    BlockCorrelated { block: usize, rho: f64 },
    /// Student-t marginals rescaled to unit variance.
    HeavyTail { dof: f64 },
}

/// Configuration of a latent source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatentSourceConfig {
    /// Vector length `2N`; even and at least 4.
    pub dim: usize,
    pub structure: LatentStructure,
    /// Marginal per-element variance of generated vectors (default 1).
    pub power_scale: f64,
}

impl LatentSourceConfig {
    pub fn new(dim: usize, structure: LatentStructure) -> Self {
        LatentSourceConfig { dim, structure, power_scale: 1.0 }
    }

    pub fn with_power_scale(mut self, power_scale: f64) -> Self {
        self.power_scale = power_scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 4 || self.dim % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "latent dim must be even and >= 4, got {}",
                self.dim
            )));
        }
        if !(self.power_scale >= 0.0) || !self.power_scale.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "power_scale must be finite and >= 0, got {}",
                self.power_scale
            )));
        }
        match self.structure {
            LatentStructure::IidGaussian => {}
            LatentStructure::Ar1 { rho } => {
                if !(-1.0 < rho && rho < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "ar1 rho must lie in (-1, 1), got {rho}"
                    )));
                }
            }
            LatentStructure::BlockCorrelated { block, rho } => {
                if block == 0 || block > self.dim {
                    return Err(Error::InvalidConfig(format!(
                        "block size must lie in 1..=dim, got {block}"
                    )));
                }
                if !(rho < 1.0) || (block > 1 && !(rho > -1.0 / (block as f64 - 1.0))) {
                    return Err(Error::InvalidConfig(format!(
                        "block rho must lie in (-1/(block-1), 1) for a valid covariance, got {rho}"
                    )));
                }
            }
            LatentStructure::HeavyTail { dof } => {
                if !(dof > 2.0) {
                    return Err(Error::InvalidConfig(format!(
                        "heavy-tail degrees of freedom must exceed 2, got {dof}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draw one latent vector with the configured structure. Marginal
/// per-element variance equals `power_scale`.
pub fn generate_latent(cfg: &LatentSourceConfig, rng: &mut RngStream) -> Result<Vec<f64>> {
    cfg.validate()?;
    let scale = cfg.power_scale.sqrt();
    let mut x = match cfg.structure {
        LatentStructure::IidGaussian => rng.normal_vec(cfg.dim),
        LatentStructure::Ar1 { rho } => {
            let mut v = Vec::with_capacity(cfg.dim);
            let w = (1.0 - rho * rho).sqrt();
            let mut prev = rng.standard_normal();
            v.push(prev);
            for _ in 1..cfg.dim {
                prev = rho * prev + w * rng.standard_normal();
                v.push(prev);
            }
            v
        }
        LatentStructure::BlockCorrelated { block, rho } => {
            let mut v = Vec::with_capacity(cfg.dim);
            let chol_full = equicorrelated_cholesky(block, rho)?;
            let mut start = 0;
            while start < cfg.dim {
                let b = block.min(cfg.dim - start);
                let tail_chol;
                let l = if b == block {
                    &chol_full
                } else {
                    tail_chol = equicorrelated_cholesky(b, rho)?;
                    &tail_chol
                };
                let z = rng.normal_vec(b);
                for i in 0..b {
                    let mut s = 0.0;
                    for k in 0..=i {
                        s += l[i][k] * z[k];
                    }
                    v.push(s);
                }
                start += b;
            }
            v
        }
        LatentStructure::HeavyTail { dof } => {
            let t = StudentT::new(dof).map_err(|e| {
                Error::InvalidConfig(format!("invalid Student-t parameter: {e}"))
            })?;
            let unit = ((dof - 2.0) / dof).sqrt();
            (0..cfg.dim).map(|_| unit * t.sample(rng)).collect()
        }
    };
    for v in &mut x {
        *v *= scale;
    }
    Ok(x)
}

/// Draw a batch of latent vectors.
pub fn generate_batch(
    cfg: &LatentSourceConfig,
    count: usize,
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>> {
    (0..count).map(|_| generate_latent(cfg, rng)).collect()
}

/// Rescale `f` so its mean square `(1/len)||f||^2` equals `target` exactly.
pub fn normalize_power(f: &[f64], target: f64) -> Result<Vec<f64>> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(Error::InvalidConfig(format!("target power must be >= 0, got {target}")));
    }
    let ms = f.iter().map(|v| v * v).sum::<f64>() / f.len().max(1) as f64;
    if !(ms > 0.0) {
        return Err(Error::DegenerateInput("cannot normalize a zero latent vector".into()));
    }
    let s = (target / ms).sqrt();
    Ok(f.iter().map(|v| v * s).collect())
}

fn equicorrelated_cholesky(b: usize, rho: f64) -> Result<Vec<Vec<f64>>> {
    let mut cov = vec![vec![rho; b]; b];
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    real_spd_cholesky(&cov)
}
