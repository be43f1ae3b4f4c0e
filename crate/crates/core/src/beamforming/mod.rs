//! Reconstruction-quality-aware beamforming: the logistic score model, its
//! concave fractional surrogate, the MM + quadratic-transform solvers for
//! uncorrelated and cooperative transmission, classic baselines, and the
//! runtime strategy registry.

pub mod baselines;
pub mod logistic;
pub mod solver;
pub mod strategy;
pub mod surrogate;

pub use baselines::{mrt, sum_rate, wmmse, wmmse_with_trace, zf};
pub use logistic::{fit_logistic, logistic_score, LogisticFit, LogisticParams};
pub use solver::{
    objective, optimize_correlated, optimize_uncorrelated, optimize_weighted, update_r, update_v,
    wrap_angle, CorrelatedOutcome, SolveReport, SolverOptions,
};
pub use strategy::{BeamformingStrategy, StrategyContext, StrategyOutcome, StrategyRegistry};
pub use surrogate::{surrogate_coeffs, zeta, SurrogateCoeffs};
