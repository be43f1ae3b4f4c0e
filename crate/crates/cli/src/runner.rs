//! Seeded end-to-end experiment runner.
//!
//! Every (seed, SNR) cell derives its random streams from the seed and the
//! SNR bits alone, so cells are independent of list order and can run on a
//! worker pool; rows are merged in (seed, SNR, user) order regardless of
//! completion order, and identical configs produce byte-identical output.

use rand::RngCore;
use rayon::prelude::*;

use semcom_core::beamforming::{
    objective, optimize_correlated, LogisticParams, SolveReport, SolverOptions, StrategyContext,
    StrategyRegistry,
};
use semcom_core::channel::{
    compensate_demap, comp_effective_link, effective_link, gen_channels, receive, sinr, transmit,
    weighted_sinr, BeamformerSet, EffectiveLink,
};
use semcom_core::diffusion::{
    denoise, DiffusionSchedule, GaussianMmsePredictor, PredictorHandle,
};
use semcom_core::grouping::{build_weights, group_users, Grouping, SimilarityMatrix};
use semcom_core::latent::{generate_latent, load_semlat, LatentSourceConfig};
use semcom_core::numerics::complex::C64;
use semcom_core::numerics::rng::{mix64, RngStream};
use semcom_core::shuffle::{demap_c, map_c, ShufflePattern};
use semcom_core::{Error, Result};
use serde::Serialize;

use crate::config::{
    DenoiserConfig, ExperimentConfig, MappingMode, Scenario, SimilaritySource, POWER_BUDGET,
};
use crate::metrics::{MetricsRow, RowMode};

// stream tags; combined with the SNR bits so every cell owns its streams
const STREAM_CHANNELS: u64 = 0x6368616e;
const STREAM_LATENTS: u64 = 0x6c617465;
const STREAM_NOISE: u64 = 0x6e6f6973;
const STREAM_PATTERNS: u64 = 0x70617474;

fn cell_stream(snr_db: f64, tag: u64) -> u64 {
    mix64(snr_db.to_bits(), tag)
}

fn snr_db_to_sigma2(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Denoiser resolved from the config (plus an optional external handle).
enum Denoiser {
    Off,
    Predictor(PredictorHandle),
}

fn resolve_denoiser(
    cfg: &ExperimentConfig,
    external: Option<PredictorHandle>,
) -> Result<Denoiser> {
    match &cfg.denoiser {
        DenoiserConfig::None => Ok(Denoiser::Off),
        DenoiserConfig::OracleGaussian { cov } => Ok(Denoiser::Predictor(std::sync::Arc::new(
            GaussianMmsePredictor::new(*cov)?,
        ))),
        DenoiserConfig::External => external.map(Denoiser::Predictor).ok_or_else(|| {
            Error::InvalidConfig(
                "denoiser 'external' needs a predictor handle passed through the library API"
                    .into(),
            )
        }),
    }
}

/// True when the per-row `post <= pre` invariant is provable: white
/// Gaussian source denoised by the identity-prior posterior mean.
fn post_le_pre_assertable(cfg: &ExperimentConfig) -> bool {
    matches!(
        (&cfg.denoiser, cfg.source.structure.as_str()),
        (
            DenoiserConfig::OracleGaussian {
                cov: semcom_core::diffusion::PriorCovariance::Identity
            },
            "iid-gaussian"
        )
    )
}

struct CellSetup {
    source: LatentSourceConfig,
    logistic: LogisticParams,
    schedule: DiffusionSchedule,
    stride: usize,
}

impl CellSetup {
    fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(CellSetup {
            source: cfg.source.to_core(cfg.latent_dim)?,
            logistic: cfg.logistic.to_core()?,
            schedule: DiffusionSchedule::make(cfg.schedule.t_steps, cfg.schedule.shape)?,
            stride: cfg.schedule.stride(),
        })
    }
}

fn denoise_or_passthrough(
    denoiser: &Denoiser,
    setup: &CellSetup,
    f_hat: &[f64],
    link: &EffectiveLink,
    pre: f64,
    truth: &[f64],
) -> Result<f64> {
    match denoiser {
        Denoiser::Off => Ok(pre),
        Denoiser::Predictor(p) => {
            let out = denoise(f_hat, link, &setup.schedule, p.as_ref(), setup.stride)?;
            Ok(mse(&out, truth))
        }
    }
}

/// Below this own-gain the sum-utility optimizer has effectively dropped
/// the user; there is no signal to phase-lock or equalize.
const STARVED_LINK: f64 = 1e-12;

/// Demap and pre-denoise MSE for one user. A starved link falls back to the
/// zero estimate (raw demap, `pre = mean(f^2)`); otherwise the observation
/// is phase-compensated and amplitude-equalized.
fn demap_and_pre(
    y: &[C64],
    h: &[C64],
    v: &[C64],
    pattern: &ShufflePattern,
    link: &EffectiveLink,
    truth: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if link.alpha < STARVED_LINK {
        let f_hat = demap_c(y, pattern)?;
        let pre = truth.iter().map(|f| f * f).sum::<f64>() / truth.len() as f64;
        return Ok((f_hat, pre));
    }
    let f_hat = compensate_demap(y, h, v, pattern)?;
    let equalized: Vec<f64> = f_hat.iter().map(|x| x / link.alpha).collect();
    let pre = mse(&equalized, truth);
    Ok((f_hat, pre))
}

/// A link whose `alpha` is safe to hand to the denoiser.
fn sanitized_link(link: &EffectiveLink) -> EffectiveLink {
    EffectiveLink { alpha: link.alpha.max(0.0), tau: link.tau }
}

/// Run the uncorrelated-data scenario: per-user patterns (or one shared
/// identity pattern), the selected beamformer, the full chain, and optional
/// denoising. One row per (seed, SNR, user).
pub fn run_uncorrelated(
    cfg: &ExperimentConfig,
    external: Option<PredictorHandle>,
) -> Result<Vec<MetricsRow>> {
    cfg.validate()?;
    if cfg.scenario != Scenario::Uncorrelated {
        return Err(Error::InvalidConfig(
            "run_uncorrelated needs scenario 'uncorrelated'".into(),
        ));
    }
    let denoiser = resolve_denoiser(cfg, external)?;
    let setup = CellSetup::from_config(cfg)?;
    let registry = StrategyRegistry::with_builtins();
    let strategy = registry.get(&cfg.beamformer)?;
    let cells: Vec<(u64, f64)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.snr_db.iter().map(move |&snr| (s, snr)))
        .collect();
    let tables: Vec<Vec<MetricsRow>> = cells
        .par_iter()
        .map(|&(seed, snr_db)| {
            run_cell_uncorrelated(cfg, &setup, strategy.as_ref(), &denoiser, seed, snr_db)
        })
        .collect::<Result<_>>()?;
    Ok(tables.into_iter().flatten().collect())
}

fn patterns_for(
    mapping: MappingMode,
    keys: &[u64],
    dim: usize,
    grouping: Option<&Grouping>,
) -> Result<Vec<ShufflePattern>> {
    match mapping {
        MappingMode::PerUserShuffle => {
            keys.iter().map(|&k| ShufflePattern::generate(k, dim)).collect()
        }
        MappingMode::SameMapping => {
            (0..keys.len()).map(|_| ShufflePattern::identity(dim)).collect()
        }
        MappingMode::GroupShared => {
            let grouping = grouping.ok_or_else(|| {
                Error::InvalidConfig("group-shared mapping needs a grouping".into())
            })?;
            (0..keys.len())
                .map(|u| {
                    let members = &grouping.groups()[grouping.group_of(u)];
                    let shared = keys[members[0]];
                    ShufflePattern::generate(shared, dim)
                })
                .collect()
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_cell_uncorrelated(
    cfg: &ExperimentConfig,
    setup: &CellSetup,
    strategy: &dyn semcom_core::beamforming::BeamformingStrategy,
    denoiser: &Denoiser,
    seed: u64,
    snr_db: f64,
) -> Result<Vec<MetricsRow>> {
    let sigma2 = snr_db_to_sigma2(snr_db);
    let mut rng_ch = RngStream::new(seed, cell_stream(snr_db, STREAM_CHANNELS));
    let ch = gen_channels(cfg.n_t, cfg.k, sigma2, &mut rng_ch)?;
    let ctx = StrategyContext {
        channels: &ch,
        p_t: POWER_BUDGET,
        logistic: &setup.logistic,
        weights: None,
        groups: None,
        options: SolverOptions::default(),
    };
    let outcome = strategy.design(&ctx)?;
    let beams = outcome.beams;

    let mut rng_keys = RngStream::new(seed, cell_stream(snr_db, STREAM_PATTERNS));
    let keys: Vec<u64> = (0..cfg.k).map(|_| rng_keys.next_u64()).collect();
    let patterns = patterns_for(cfg.mapping, &keys, cfg.latent_dim, None)?;

    let mut rng_lat = RngStream::new(seed, cell_stream(snr_db, STREAM_LATENTS));
    let latents: Vec<Vec<f64>> =
        (0..cfg.k).map(|_| generate_latent(&setup.source, &mut rng_lat)).collect::<Result<_>>()?;

    let symbols: Vec<Vec<C64>> = latents
        .iter()
        .zip(&patterns)
        .map(|(f, p)| map_c(f, p))
        .collect::<Result<_>>()?;
    let x = transmit(&symbols, &beams)?;
    let cell_objective = objective(&ch, &beams, &setup.logistic, None)?;

    let mut rng_noise = RngStream::new(seed, cell_stream(snr_db, STREAM_NOISE));
    let check_post = post_le_pre_assertable(cfg);
    let mut rows = Vec::with_capacity(cfg.k);
    for k in 0..cfg.k {
        let y = receive(&x, ch.h(k), sigma2, &mut rng_noise);
        let link = effective_link(&ch, &beams, k);
        let (f_hat, pre) =
            demap_and_pre(&y, ch.h(k), beams.v(k), &patterns[k], &link, &latents[k])?;
        let post = denoise_or_passthrough(denoiser, setup, &f_hat, &link, pre, &latents[k])?;
        // provable only for live links: a starved user's sampler output is a
        // prior-like sample, which is worse than the zero estimate
        if check_post && link.alpha >= STARVED_LINK && post > pre + 1e-9 {
            return Err(Error::NumericalFailure(format!(
                "oracle denoiser raised the latent MSE for user {k} (pre {pre}, post {post})"
            )));
        }
        rows.push(MetricsRow {
            seed,
            snr_db,
            user: k,
            latent_mse_pre: pre,
            latent_mse_post: post,
            alpha: link.alpha,
            tau: link.tau,
            gamma: sinr(&ch, &beams, k),
            objective: cell_objective,
            group_id: k,
            phase_residual: None,
            mode: RowMode::Single,
        });
    }
    Ok(rows)
}

fn similarity_for(
    cfg: &ExperimentConfig,
    sn: usize,
) -> Result<SimilarityMatrix> {
    let grouping_cfg = cfg.grouping.as_ref().expect("validated");
    match &grouping_cfg.similarity {
        SimilaritySource::Duplicates => {
            let k = cfg.k;
            let mut rows = vec![vec![0.0; k]; k];
            for i in 0..k {
                for j in 0..k {
                    rows[i][j] = if i / sn == j / sn { 1.0 } else { 0.0 };
                }
            }
            SimilarityMatrix::new(rows)
        }
        SimilaritySource::Csv(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidConfig(format!("cannot read similarity csv {}: {e}", path.display()))
            })?;
            let m = SimilarityMatrix::from_csv_str(&text)?;
            if m.size() != cfg.k {
                return Err(Error::InvalidConfig(format!(
                    "similarity matrix is {}x{0} but k = {}",
                    m.size(),
                    cfg.k
                )));
            }
            Ok(m)
        }
        SimilaritySource::Embeddings(path) => {
            let batch = load_semlat(path)?;
            if batch.count() != cfg.k {
                return Err(Error::InvalidConfig(format!(
                    "embedding batch has {} vectors but k = {}",
                    batch.count(),
                    cfg.k
                )));
            }
            SimilarityMatrix::from_embeddings(&batch.vectors)
        }
    }
}

/// Run the correlated-data scenario: latents duplicated `SN` times,
/// similarity-driven grouping, the cooperative pipeline with group-shared
/// patterns and phase alignment, plus the non-cooperative baseline on the
/// same channels, latents, and noise. Cooperative rows come first in each
/// cell, then baseline rows.
///
/// Cooperative effective links fold the similarity-weighted share of the
/// in-group gain into `alpha` and its phase-misaligned remainder into
/// `tau`; the policy is visible in the `alpha`/`tau` columns of comp rows.
pub fn run_correlated(
    cfg: &ExperimentConfig,
    external: Option<PredictorHandle>,
) -> Result<Vec<MetricsRow>> {
    cfg.validate()?;
    if cfg.scenario != Scenario::Correlated {
        return Err(Error::InvalidConfig("run_correlated needs scenario 'correlated'".into()));
    }
    let denoiser = resolve_denoiser(cfg, external)?;
    let setup = CellSetup::from_config(cfg)?;
    let sn = cfg.duplication.expect("validated");
    let similarity = similarity_for(cfg, sn)?;
    let cells: Vec<(u64, f64)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.snr_db.iter().map(move |&snr| (s, snr)))
        .collect();
    let tables: Vec<Vec<MetricsRow>> = cells
        .par_iter()
        .map(|&(seed, snr_db)| {
            run_cell_correlated(cfg, &setup, &denoiser, &similarity, sn, seed, snr_db)
        })
        .collect::<Result<_>>()?;
    Ok(tables.into_iter().flatten().collect())
}

#[allow(clippy::too_many_arguments)]
fn run_cell_correlated(
    cfg: &ExperimentConfig,
    setup: &CellSetup,
    denoiser: &Denoiser,
    similarity: &SimilarityMatrix,
    sn: usize,
    seed: u64,
    snr_db: f64,
) -> Result<Vec<MetricsRow>> {
    let sigma2 = snr_db_to_sigma2(snr_db);
    let th = cfg.grouping.as_ref().expect("validated").threshold;
    let mut rng_ch = RngStream::new(seed, cell_stream(snr_db, STREAM_CHANNELS));
    let ch = gen_channels(cfg.n_t, cfg.k, sigma2, &mut rng_ch)?;

    // grouping pre-pass; its beams double as the non-cooperative baseline
    let opts = SolverOptions::default();
    let grouped = group_users(similarity, th, &ch, POWER_BUDGET, &setup.logistic, &opts)?;
    let omega = build_weights(&grouped.grouping, similarity);
    let comp = optimize_correlated(
        &ch,
        POWER_BUDGET,
        &setup.logistic,
        &omega,
        &grouped.grouping,
        &opts,
    )?;

    // duplicated latents: user u transmits base latent u / SN
    let mut rng_lat = RngStream::new(seed, cell_stream(snr_db, STREAM_LATENTS));
    let base: Vec<Vec<f64>> = (0..cfg.k / sn)
        .map(|_| generate_latent(&setup.source, &mut rng_lat))
        .collect::<Result<_>>()?;
    let latents: Vec<&Vec<f64>> = (0..cfg.k).map(|u| &base[u / sn]).collect();

    let mut rng_keys = RngStream::new(seed, cell_stream(snr_db, STREAM_PATTERNS));
    let keys: Vec<u64> = (0..cfg.k).map(|_| rng_keys.next_u64()).collect();

    let mut rows = Vec::with_capacity(2 * cfg.k);

    // cooperative pipeline: group-shared patterns, aligned beams, receive
    // phases from the alignment rule
    {
        let patterns =
            patterns_for(MappingMode::GroupShared, &keys, cfg.latent_dim, Some(&grouped.grouping))?;
        let symbols: Vec<Vec<C64>> = latents
            .iter()
            .zip(&patterns)
            .map(|(f, p)| map_c(f, p))
            .collect::<Result<_>>()?;
        let x = transmit(&symbols, &comp.beams)?;
        let cell_objective = objective(&ch, &comp.beams, &setup.logistic, Some(&omega))?;
        let mut rng_noise = RngStream::new(seed, cell_stream(snr_db, STREAM_NOISE));
        for u in 0..cfg.k {
            let y = receive(&x, ch.h(u), sigma2, &mut rng_noise);
            let partner = grouped.grouping.partner(u);
            let (f_hat, link, pre) = match partner {
                None => {
                    let link = effective_link(&ch, &comp.beams, u);
                    let (f_hat, pre) = demap_and_pre(
                        &y,
                        ch.h(u),
                        comp.beams.v(u),
                        &patterns[u],
                        &link,
                        latents[u],
                    )?;
                    (f_hat, link, pre)
                }
                Some(p) => {
                    // pair member: the receive phase comes from the
                    // alignment rule, not the own-link phase
                    let rot = C64::from_polar(1.0, comp.receive_phases[u]);
                    let compensated: Vec<C64> = y.iter().map(|s| rot * s).collect();
                    let f_hat = demap_c(&compensated, &patterns[u])?;
                    let link = comp_effective_link(
                        &ch,
                        &comp.beams,
                        u,
                        Some(p),
                        comp.receive_phases[u],
                        omega.at(u, p),
                    );
                    let pre = if link.alpha < STARVED_LINK {
                        latents[u].iter().map(|f| f * f).sum::<f64>() / latents[u].len() as f64
                    } else {
                        let eq: Vec<f64> = f_hat.iter().map(|v| v / link.alpha).collect();
                        mse(&eq, latents[u])
                    };
                    (f_hat, link, pre)
                }
            };
            let link = sanitized_link(&link);
            let post =
                denoise_or_passthrough(denoiser, setup, &f_hat, &link, pre, latents[u])?;
            rows.push(MetricsRow {
                seed,
                snr_db,
                user: u,
                latent_mse_pre: pre,
                latent_mse_post: post,
                alpha: link.alpha,
                tau: link.tau,
                gamma: weighted_sinr(&ch, &comp.beams, u, omega.row(u)),
                objective: cell_objective,
                group_id: grouped.grouping.group_of(u),
                phase_residual: comp.pair_phase_residual[u],
                mode: RowMode::Comp,
            });
        }
    }

    // non-cooperative baseline: per-user patterns, pre-pass beams, same
    // latents and the same noise realization
    {
        let patterns = patterns_for(MappingMode::PerUserShuffle, &keys, cfg.latent_dim, None)?;
        let symbols: Vec<Vec<C64>> = latents
            .iter()
            .zip(&patterns)
            .map(|(f, p)| map_c(f, p))
            .collect::<Result<_>>()?;
        let baseline: &BeamformerSet = &grouped.prepass_beams;
        let x = transmit(&symbols, baseline)?;
        let cell_objective = objective(&ch, baseline, &setup.logistic, None)?;
        let mut rng_noise = RngStream::new(seed, cell_stream(snr_db, STREAM_NOISE));
        for u in 0..cfg.k {
            let y = receive(&x, ch.h(u), sigma2, &mut rng_noise);
            let link = effective_link(&ch, baseline, u);
            let (f_hat, pre) =
                demap_and_pre(&y, ch.h(u), baseline.v(u), &patterns[u], &link, latents[u])?;
            let post =
                denoise_or_passthrough(denoiser, setup, &f_hat, &link, pre, latents[u])?;
            rows.push(MetricsRow {
                seed,
                snr_db,
                user: u,
                latent_mse_pre: pre,
                latent_mse_post: post,
                alpha: link.alpha,
                tau: link.tau,
                gamma: sinr(&ch, baseline, u),
                objective: cell_objective,
                group_id: u,
                phase_residual: None,
                mode: RowMode::NonComp,
            });
        }
    }

    Ok(rows)
}

/// One solver trace per (seed, SNR) cell.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub seed: u64,
    pub snr_db: f64,
    pub report: SolveReport,
}

/// Run the proposed beamformer across the config grid and collect the
/// solver reports (no transmission chain).
pub fn bench_beamforming(cfg: &ExperimentConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let logistic = cfg.logistic.to_core()?;
    let cells: Vec<(u64, f64)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.snr_db.iter().map(move |&snr| (s, snr)))
        .collect();
    cells
        .par_iter()
        .map(|&(seed, snr_db)| {
            let sigma2 = snr_db_to_sigma2(snr_db);
            let mut rng_ch = RngStream::new(seed, cell_stream(snr_db, STREAM_CHANNELS));
            let ch = gen_channels(cfg.n_t, cfg.k, sigma2, &mut rng_ch)?;
            let (_, report) = semcom_core::beamforming::optimize_uncorrelated(
                &ch,
                POWER_BUDGET,
                &logistic,
                &SolverOptions::default(),
            )?;
            Ok(BenchRecord { seed, snr_db, report })
        })
        .collect()
}
