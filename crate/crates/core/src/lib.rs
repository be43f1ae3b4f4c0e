//! Latent-domain simulator and optimization library for downlink multi-user
//! MISO semantic communication.
//!
//! The crate provides the building blocks of a shuffle-orthogonalized
//! multi-user transmission chain and its optimization machinery:
//!
//! - [`numerics`]: complex linear algebra kernels, seeded random streams,
//!   and statistical test primitives.
//! - [`latent`]: synthetic semantic-latent sources with controllable
//!   correlation structure, plus the SEMLAT1 container format.
//! - [`shuffle`]: the per-user shuffle-and-combine symbol mapping, its
//!   inverse, and Gaussianity diagnostics for cross-user interference.
//! - [`channel`]: the downlink MU-MISO chain (precode, superpose, fade,
//!   noise, phase compensation, demap) and all SINR quantities.
//! - [`beamforming`]: logistic reconstruction-quality model, the
//!   majorization-minimization beamformer with quadratic-transform updates,
//!   its weighted cooperative variant, MRT/ZF/WMMSE baselines, and a
//!   name-keyed strategy registry.
//! - [`diffusion`]: noise schedules, deterministic reverse stepping, step
//!   matching, and a pluggable clean-latent predictor interface with a
//!   closed-form Gaussian-prior oracle.
//! - [`grouping`]: similarity evaluation, channel- and similarity-aware
//!   user grouping, and interference weight matrices for cooperative
//!   transmission.

pub mod beamforming;
pub mod channel;
pub mod diffusion;
pub mod error;
pub mod grouping;
pub mod latent;
pub mod numerics;
pub mod shuffle;

pub use error::{Error, Result};
