//! Experiment harness for the semcom simulator: strict JSON configuration,
//! seeded Monte Carlo runners for the uncorrelated and correlated downlink
//! scenarios, and CSV/JSON metric emission.

pub mod config;
pub mod metrics;
pub mod runner;

pub use config::ExperimentConfig;
pub use metrics::{emit, MetricsRow, OutputFormat, RowMode};
pub use runner::{bench_beamforming, run_correlated, run_uncorrelated, BenchRecord};
