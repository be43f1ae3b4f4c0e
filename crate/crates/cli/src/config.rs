//! Experiment configuration: a single strict-schema JSON document. Unknown
//! keys are rejected so sweep typos fail loudly, and semantic validation
//! errors name the offending field.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use semcom_core::beamforming::LogisticParams;
use semcom_core::diffusion::{PriorCovariance, ScheduleShape};
use semcom_core::latent::{LatentSourceConfig, LatentStructure};
use semcom_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Uncorrelated,
    Correlated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingMode {
    /// Every user gets a unique random shuffle pattern.
    PerUserShuffle,
    /// All users share the identity pattern (the conventional mapping).
    SameMapping,
    /// Co-grouped users share one pattern (correlated scenario only).
    GroupShared,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// One of `iid-gaussian`, `ar1`, `block-correlated`, `heavy-tail`.
    pub structure: String,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub block: Option<usize>,
    #[serde(default)]
    pub dof: Option<f64>,
    #[serde(default = "one")]
    pub power_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl SourceConfig {
    pub fn to_core(&self, dim: usize) -> Result<LatentSourceConfig> {
        let complain = |field: &str, needed: bool| {
            Error::InvalidConfig(if needed {
                format!("source.{field} is required for structure '{}'", self.structure)
            } else {
                format!("source.{field} is not used by structure '{}'", self.structure)
            })
        };
        let structure = match self.structure.as_str() {
            "iid-gaussian" => {
                if self.rho.is_some() {
                    return Err(complain("rho", false));
                }
                if self.block.is_some() {
                    return Err(complain("block", false));
                }
                if self.dof.is_some() {
                    return Err(complain("dof", false));
                }
                LatentStructure::IidGaussian
            }
            "ar1" => {
                if self.block.is_some() {
                    return Err(complain("block", false));
                }
                if self.dof.is_some() {
                    return Err(complain("dof", false));
                }
                LatentStructure::Ar1 { rho: self.rho.ok_or_else(|| complain("rho", true))? }
            }
            "block-correlated" => {
                if self.dof.is_some() {
                    return Err(complain("dof", false));
                }
                LatentStructure::BlockCorrelated {
                    block: self.block.ok_or_else(|| complain("block", true))?,
                    rho: self.rho.ok_or_else(|| complain("rho", true))?,
                }
            }
            "heavy-tail" => {
                if self.rho.is_some() {
                    return Err(complain("rho", false));
                }
                if self.block.is_some() {
                    return Err(complain("block", false));
                }
                LatentStructure::HeavyTail { dof: self.dof.ok_or_else(|| complain("dof", true))? }
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "source.structure '{other}' is not one of \
                     iid-gaussian/ar1/block-correlated/heavy-tail"
                )))
            }
        };
        let cfg = LatentSourceConfig { dim, structure, power_scale: self.power_scale };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parse a compact source spec string `structure:dim[:param[:param]]`, e.g.
/// `ar1:512:0.9` or `heavy-tail:512:3`. Used by the CLI report command.
pub fn parse_source_spec(spec: &str) -> Result<LatentSourceConfig> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |what: &str| Error::InvalidConfig(format!("source spec '{spec}': {what}"));
    if parts.len() < 2 {
        return Err(bad("expected structure:dim[:params]"));
    }
    let dim: usize = parts[1].parse().map_err(|_| bad("dim must be an integer"))?;
    let parse_f = |s: &str| s.parse::<f64>().map_err(|_| bad("numeric parameter expected"));
    let structure = match (parts[0], parts.len()) {
        ("iid-gaussian", 2) => LatentStructure::IidGaussian,
        ("ar1", 3) => LatentStructure::Ar1 { rho: parse_f(parts[2])? },
        ("block-correlated", 4) => LatentStructure::BlockCorrelated {
            block: parts[2].parse().map_err(|_| bad("block must be an integer"))?,
            rho: parse_f(parts[3])?,
        },
        ("heavy-tail", 3) => LatentStructure::HeavyTail { dof: parse_f(parts[2])? },
        _ => return Err(bad("unknown structure or wrong parameter count")),
    };
    let cfg = LatentSourceConfig::new(dim, structure);
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default = "default_steps")]
    pub t_steps: usize,
    #[serde(default = "default_shape")]
    pub shape: ScheduleShape,
    /// Reverse stride in grid cells; defaults to `t_steps / 50`.
    #[serde(default)]
    pub stride: Option<usize>,
}

fn default_steps() -> usize {
    1000
}

fn default_shape() -> ScheduleShape {
    ScheduleShape::Linear
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { t_steps: default_steps(), shape: default_shape(), stride: None }
    }
}

impl ScheduleConfig {
    pub fn stride(&self) -> usize {
        self.stride.unwrap_or_else(|| (self.t_steps / 50).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DenoiserConfig {
    /// Closed-form posterior-mean predictor for a Gaussian prior.
    OracleGaussian {
        #[serde(default = "default_cov")]
        cov: PriorCovariance,
    },
    /// No denoising; post-MSE equals pre-MSE.
    None,
    /// Caller-supplied predictor attached through the library API.
    External,
}

fn default_cov() -> PriorCovariance {
    PriorCovariance::Identity
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
}

impl LogisticConfig {
    pub fn to_core(&self) -> Result<LogisticParams> {
        LogisticParams::from_linear(self.a, self.b, self.c, self.e)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilaritySource {
    /// Exact-duplicate similarity: 1 within a duplication block, 0 across.
    Duplicates,
    /// K x K similarity matrix from a CSV file.
    Csv(PathBuf),
    /// Embedding vectors in a SEMLAT1 container; cosine similarity.
    Embeddings(PathBuf),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupingConfig {
    /// Mean-similarity join threshold in (-1, 1). No default on purpose:
    /// the value is scenario-dependent.
    pub threshold: f64,
    pub similarity: SimilaritySource,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n_t: usize,
    pub k: usize,
    /// Latent vector length `2N`.
    pub latent_dim: usize,
    pub snr_db: Vec<f64>,
    pub seeds: Vec<u64>,
    pub source: SourceConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    /// Beamformer registry name: proposed, mrt, zf, or wmmse.
    pub beamformer: String,
    pub mapping: MappingMode,
    pub denoiser: DenoiserConfig,
    pub logistic: LogisticConfig,
    #[serde(default)]
    pub grouping: Option<GroupingConfig>,
    /// Semantic duplication factor SN (correlated scenario only).
    #[serde(default)]
    pub duplication: Option<usize>,
}

/// Total power budget; the harness pins `P_T = 1` so SNR = 1/sigma2.
pub const POWER_BUDGET: f64 = 1.0;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.as_ref().display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k == 0 || self.n_t == 0 {
            return bad(format!("k and n_t must be positive (k = {}, n_t = {})", self.k, self.n_t));
        }
        if self.snr_db.is_empty() {
            return bad("snr_db grid must be nonempty".into());
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_db values must be finite".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must be nonempty".into());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("seeds must be distinct".into());
        }
        self.source.to_core(self.latent_dim)?;
        self.logistic.to_core()?;
        if self.schedule.t_steps < 2 {
            return bad(format!("schedule.t_steps must be >= 2, got {}", self.schedule.t_steps));
        }
        if self.schedule.stride() > self.schedule.t_steps {
            return bad(format!(
                "schedule.stride {} exceeds t_steps {}",
                self.schedule.stride(),
                self.schedule.t_steps
            ));
        }
        match self.scenario {
            Scenario::Uncorrelated => {
                if self.duplication.is_some() {
                    return bad("duplication is only valid in the correlated scenario".into());
                }
                if self.grouping.is_some() {
                    return bad("grouping is only valid in the correlated scenario".into());
                }
                if self.mapping == MappingMode::GroupShared {
                    return bad(
                        "mapping 'group-shared' is only valid in the correlated scenario".into(),
                    );
                }
            }
            Scenario::Correlated => {
                let sn = match self.duplication {
                    Some(sn) if sn >= 1 => sn,
                    Some(sn) => return bad(format!("duplication must be >= 1, got {sn}")),
                    None => return bad("correlated scenario requires duplication".into()),
                };
                if self.k % sn != 0 {
                    return bad(format!(
                        "duplication {sn} must divide the user count {}",
                        self.k
                    ));
                }
                let grouping = match &self.grouping {
                    Some(g) => g,
                    None => return bad("correlated scenario requires grouping".into()),
                };
                if !(-1.0 < grouping.threshold && grouping.threshold < 1.0) {
                    return bad(format!(
                        "grouping.threshold must lie in (-1, 1), got {}",
                        grouping.threshold
                    ));
                }
                if self.mapping != MappingMode::GroupShared {
                    return bad("correlated scenario requires mapping 'group-shared'".into());
                }
                if self.beamformer != "proposed" {
                    return bad(format!(
                        "correlated scenario requires beamformer 'proposed' \
                         (cooperative phase alignment), got '{}'",
                        self.beamformer
                    ));
                }
            }
        }
        Ok(())
    }
}
