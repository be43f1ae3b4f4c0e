//! Cumulative noise-variance schedules over the grid `t = i/T`, `i = 1..=T`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the cumulative-variance curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleShape {
    /// `beta_bar(t) = 0.999 t`.
    Linear,
    /// `beta_bar(t) = sin^2(pi t / 2)`, capped at 0.999 near `t = 1`.
    Cosine,
}

/// Monotone grid of cumulative noise variances; `beta_bar(0) = 0` is the
/// clean endpoint, index `T` corresponds to `t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionSchedule {
    grid: Vec<f64>,
}

impl DiffusionSchedule {
    /// Build a `T`-step schedule of the given shape (`T >= 2`).
    pub fn make(steps: usize, shape: ScheduleShape) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "schedule needs at least 2 steps, got {steps}"
            )));
        }
        let grid = (1..=steps)
            .map(|i| {
                let t = i as f64 / steps as f64;
                match shape {
                    ScheduleShape::Linear => 0.999 * t,
                    ScheduleShape::Cosine => {
                        let s = (std::f64::consts::FRAC_PI_2 * t).sin();
                        (s * s).min(0.999)
                    }
                }
            })
            .collect();
        Self::from_grid(grid)
    }

    /// Build from an explicit grid of cumulative variances for `i = 1..=T`.
    /// Values must be nondecreasing and lie in `[0, 1)`.
    pub fn from_grid(grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidConfig("schedule grid must be nonempty".into()));
        }
        for (i, w) in grid.windows(2).enumerate() {
            if !(w[1] >= w[0]) {
                return Err(Error::InvalidConfig(format!(
                    "schedule must be nondecreasing, grid[{}] = {} > grid[{}] = {}",
                    i,
                    w[0],
                    i + 1,
                    w[1]
                )));
            }
        }
        if grid.iter().any(|&b| !(0.0..1.0).contains(&b)) {
            return Err(Error::InvalidConfig("schedule values must lie in [0, 1)".into()));
        }
        Ok(DiffusionSchedule { grid })
    }

    /// Number of grid points `T`.
    pub fn steps(&self) -> usize {
        self.grid.len()
    }

    /// Cumulative variance at grid index `i in 0..=T`; index 0 is the clean
    /// endpoint with `beta_bar = 0`.
    pub fn beta_bar_at(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.grid[i - 1]
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Mean of `beta_bar` over the grid.
    pub fn mean_beta_bar(&self) -> f64 {
        self.grid.iter().sum::<f64>() / self.grid.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_endpoint() {
        let s = DiffusionSchedule::make(1000, ScheduleShape::Linear).unwrap();
        assert!((s.beta_bar_at(1000) - 0.999).abs() < 1e-15);
        assert_eq!(s.beta_bar_at(0), 0.0);
    }

    #[test]
    fn schedules_are_monotone() {
        for shape in [ScheduleShape::Linear, ScheduleShape::Cosine] {
            let s = DiffusionSchedule::make(500, shape).unwrap();
            for i in 1..=500 {
                assert!(s.beta_bar_at(i) >= s.beta_bar_at(i - 1));
                assert!(s.beta_bar_at(i) < 1.0);
            }
        }
    }

    #[test]
    fn cosine_midpoint_is_half() {
        let s = DiffusionSchedule::make(1000, ScheduleShape::Cosine).unwrap();
        assert!((s.beta_bar_at(500) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn too_short_schedules_are_rejected() {
        assert!(DiffusionSchedule::make(1, ScheduleShape::Linear).is_err());
        assert!(DiffusionSchedule::from_grid(vec![0.2, 0.1]).is_err());
        assert!(DiffusionSchedule::from_grid(vec![0.2, 1.0]).is_err());
    }
}
