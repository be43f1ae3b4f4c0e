//! Name-keyed beamforming strategy registry.
//!
//! Every beamformer variant sits behind [`BeamformingStrategy`] and is
//! registered under a stable name, so experiment configs select the
//! algorithm at runtime ("proposed", "mrt", "zf", "wmmse") without the
//! harness hard-coding dispatch.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::beamforming::baselines::{mrt, wmmse, zf};
use crate::beamforming::logistic::LogisticParams;
use crate::beamforming::solver::{
    optimize_correlated, optimize_uncorrelated, SolveReport, SolverOptions,
};
use crate::channel::{BeamformerSet, ChannelSet};
use crate::error::{Error, Result};
use crate::grouping::{Grouping, WeightMatrix};

/// Everything a strategy may look at when designing beams.
pub struct StrategyContext<'a> {
    pub channels: &'a ChannelSet,
    pub p_t: f64,
    pub logistic: &'a LogisticParams,
    /// Semantic interference weights; used only by cooperative designs.
    pub weights: Option<&'a WeightMatrix>,
    /// User grouping; used only by cooperative designs.
    pub groups: Option<&'a Grouping>,
    pub options: SolverOptions,
}

/// Output of a strategy: beams, optional per-user receive phases (pair
/// alignment), the measured per-user pair phase residuals, and the solver
/// report when the strategy is iterative.
pub struct StrategyOutcome {
    pub beams: BeamformerSet,
    pub receive_phases: Option<Vec<f64>>,
    pub pair_phase_residual: Vec<Option<f64>>,
    pub report: Option<SolveReport>,
}

impl StrategyOutcome {
    fn plain(beams: BeamformerSet, users: usize, report: Option<SolveReport>) -> Self {
        StrategyOutcome {
            beams,
            receive_phases: None,
            pair_phase_residual: vec![None; users],
            report,
        }
    }
}

/// A beamformer variant selectable by name.
pub trait BeamformingStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn design(&self, ctx: &StrategyContext<'_>) -> Result<StrategyOutcome>;
}

struct Proposed;

impl BeamformingStrategy for Proposed {
    fn name(&self) -> &'static str {
        "proposed"
    }

    fn design(&self, ctx: &StrategyContext<'_>) -> Result<StrategyOutcome> {
        let users = ctx.channels.users();
        match (ctx.weights, ctx.groups) {
            (Some(w), Some(g)) => {
                let out = optimize_correlated(
                    ctx.channels,
                    ctx.p_t,
                    ctx.logistic,
                    w,
                    g,
                    &ctx.options,
                )?;
                Ok(StrategyOutcome {
                    beams: out.beams,
                    receive_phases: Some(out.receive_phases),
                    pair_phase_residual: out.pair_phase_residual,
                    report: Some(out.report),
                })
            }
            (None, None) => {
                let (beams, report) =
                    optimize_uncorrelated(ctx.channels, ctx.p_t, ctx.logistic, &ctx.options)?;
                Ok(StrategyOutcome::plain(beams, users, Some(report)))
            }
            _ => Err(Error::InvalidConfig(
                "cooperative design needs both weights and groups (or neither)".into(),
            )),
        }
    }
}

macro_rules! baseline_strategy {
    ($ty:ident, $name:literal, $f:expr) => {
        struct $ty;

        impl BeamformingStrategy for $ty {
            fn name(&self) -> &'static str {
                $name
            }

            fn design(&self, ctx: &StrategyContext<'_>) -> Result<StrategyOutcome> {
                let beams = $f(ctx.channels, ctx.p_t)?;
                Ok(StrategyOutcome::plain(beams, ctx.channels.users(), None))
            }
        }
    };
}

baseline_strategy!(Mrt, "mrt", mrt);
baseline_strategy!(Zf, "zf", zf);
baseline_strategy!(Wmmse, "wmmse", wmmse);

/// Registry of beamforming strategies keyed by name.
pub struct StrategyRegistry {
    inner: BTreeMap<&'static str, Arc<dyn BeamformingStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { inner: BTreeMap::new() }
    }

    /// Registry pre-populated with the built-in strategies.
    pub fn with_builtins() -> Self {
        let mut r = StrategyRegistry::empty();
        r.register(Arc::new(Proposed));
        r.register(Arc::new(Mrt));
        r.register(Arc::new(Zf));
        r.register(Arc::new(Wmmse));
        r
    }

    pub fn register(&mut self, strategy: Arc<dyn BeamformingStrategy>) {
        self.inner.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn BeamformingStrategy>> {
        self.inner.get(name).cloned().ok_or_else(|| {
            Error::InvalidConfig(format!(
                "unknown beamformer '{name}'; available: {}",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.inner.keys().copied().collect()
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gen_channels;
    use crate::numerics::rng::RngStream;

    #[test]
    fn builtins_are_registered() {
        let reg = StrategyRegistry::with_builtins();
        assert_eq!(reg.names(), vec!["mrt", "proposed", "wmmse", "zf"]);
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn every_builtin_produces_feasible_beams() {
        let mut rng = RngStream::new(111, 0);
        let ch = gen_channels(8, 4, 0.1, &mut rng).unwrap();
        let params = LogisticParams::from_linear(0.2, 0.7, 1.5, 1.2).unwrap();
        let reg = StrategyRegistry::with_builtins();
        for name in reg.names() {
            let ctx = StrategyContext {
                channels: &ch,
                p_t: 1.0,
                logistic: &params,
                weights: None,
                groups: None,
                options: SolverOptions::default(),
            };
            let out = reg.get(name).unwrap().design(&ctx).unwrap();
            assert!(
                out.beams.total_power() <= 1.0 + 1e-9,
                "{name}: power {}",
                out.beams.total_power()
            );
        }
    }
}
