//! Forward diffusion, the deterministic reverse step, step matching, and
//! the receiver-side denoising loop.
//!
//! Forward: `x_t = sqrt(1 - b_t) x_0 + sqrt(b_t) n`. The deterministic
//! reverse step from level `b_t` to `b_s <= b_t` given a clean estimate is
//!
//! ```text
//! x_s = sqrt(b_s/b_t) x_t + (sqrt(1-b_s) - sqrt(b_s (1-b_t) / b_t)) x0_hat
//! ```
//!
//! (the rearranged form; algebraically identical to substituting the clean
//! estimate into the forward identity). Denoising a received latent first
//! normalizes it by `1/sqrt(alpha^2 + tau^2)`, matches the observed noise
//! fraction `tau / sqrt(alpha^2 + tau^2)` to the nearest grid point of
//! `sqrt(beta_bar)`, then walks the grid down in strides of `m` cells.

use crate::channel::EffectiveLink;
use crate::diffusion::predictor::DenoisePredictor;
use crate::diffusion::schedule::DiffusionSchedule;
use crate::error::{Error, Result};
use crate::numerics::rng::RngStream;

/// Sample the forward process at cumulative variance `beta_bar_t`.
pub fn forward_diffuse(x0: &[f64], beta_bar_t: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&beta_bar_t) {
        return Err(Error::InvalidConfig(format!(
            "beta_bar must lie in [0, 1), got {beta_bar_t}"
        )));
    }
    let a = (1.0 - beta_bar_t).sqrt();
    let b = beta_bar_t.sqrt();
    Ok(x0.iter().map(|x| a * x + b * rng.standard_normal()).collect())
}

/// Jump the forward process from level `beta_bar_s` to `beta_bar_t > beta_bar_s`:
/// `x_t = sqrt((1-b_t)/(1-b_s)) x_s + sqrt(b_t - b_s (1-b_t)/(1-b_s)) n`.
pub fn forward_skip(
    x_s: &[f64],
    beta_bar_s: f64,
    beta_bar_t: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&beta_bar_s) || !(0.0..1.0).contains(&beta_bar_t) {
        return Err(Error::InvalidConfig("beta_bar values must lie in [0, 1)".into()));
    }
    if !(beta_bar_t >= beta_bar_s) {
        return Err(Error::InvalidConfig(format!(
            "forward skip needs beta_bar_t >= beta_bar_s, got {beta_bar_t} < {beta_bar_s}"
        )));
    }
    let ratio = (1.0 - beta_bar_t) / (1.0 - beta_bar_s);
    let a = ratio.sqrt();
    let b = (beta_bar_t - beta_bar_s * ratio).max(0.0).sqrt();
    Ok(x_s.iter().map(|x| a * x + b * rng.standard_normal()).collect())
}

/// One deterministic reverse step from level `beta_bar_t` down to
/// `beta_bar_s` using the clean estimate `x0_hat`.
pub fn ddim_step(
    x_t: &[f64],
    beta_bar_t: f64,
    beta_bar_s: f64,
    x0_hat: &[f64],
) -> Result<Vec<f64>> {
    if !(beta_bar_t > 0.0) {
        return Err(Error::InvalidConfig("reverse step needs beta_bar_t > 0".into()));
    }
    if !(0.0..=1.0).contains(&beta_bar_s) || beta_bar_s > beta_bar_t {
        return Err(Error::InvalidConfig(format!(
            "reverse step needs 0 <= beta_bar_s <= beta_bar_t, got s = {beta_bar_s}, t = {beta_bar_t}"
        )));
    }
    if x_t.len() != x0_hat.len() {
        return Err(Error::DimensionMismatch("x_t and x0_hat lengths differ".into()));
    }
    let (ct, c0) = ddim_coefficients(beta_bar_t, beta_bar_s);
    Ok(x_t.iter().zip(x0_hat).map(|(xt, x0)| ct * xt + c0 * x0).collect())
}

/// Scalar coefficients `(coef_xt, coef_x0)` of the reverse step.
pub fn ddim_coefficients(beta_bar_t: f64, beta_bar_s: f64) -> (f64, f64) {
    let ct = (beta_bar_s / beta_bar_t).sqrt();
    let c0 = (1.0 - beta_bar_s).sqrt() - (beta_bar_s * (1.0 - beta_bar_t) / beta_bar_t).sqrt();
    (ct, c0)
}

/// Result of matching an observed link to the noise schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMatch {
    /// Grid index `1..=T` whose `sqrt(beta_bar)` is closest to the observed
    /// noise fraction; ties break toward the smaller index.
    pub start_index: usize,
    /// Power normalization `1 / sqrt(alpha^2 + tau^2)`.
    pub scale: f64,
}

/// Match the observed `(alpha, tau)` to a starting grid point.
pub fn step_match(alpha: f64, tau: f64, schedule: &DiffusionSchedule) -> Result<StepMatch> {
    if !(alpha >= 0.0) || !(tau > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "step matching needs alpha >= 0 and tau > 0, got alpha = {alpha}, tau = {tau}"
        )));
    }
    let energy = alpha * alpha + tau * tau;
    let target = tau / energy.sqrt();
    let mut best_i = 1;
    let mut best_d = f64::INFINITY;
    for i in 1..=schedule.steps() {
        let d = (target - schedule.beta_bar_at(i).sqrt()).abs();
        if d < best_d {
            best_d = d;
            best_i = i;
        }
    }
    Ok(StepMatch { start_index: best_i, scale: 1.0 / energy.sqrt() })
}

/// Receiver-side denoising: normalize the received latent, match the start
/// step, then walk the schedule down in strides of `stride_m` grid cells,
/// querying the predictor at each level. Returns the final clean estimate.
/// Fully deterministic given its inputs.
pub fn denoise(
    f_hat: &[f64],
    link: &EffectiveLink,
    schedule: &DiffusionSchedule,
    predictor: &dyn DenoisePredictor,
    stride_m: usize,
) -> Result<Vec<f64>> {
    if stride_m == 0 {
        return Err(Error::InvalidConfig("denoise stride must be at least 1".into()));
    }
    let matched = step_match(link.alpha, link.tau, schedule)?;
    let mut x: Vec<f64> = f_hat.iter().map(|v| matched.scale * v).collect();
    let mut t_idx = matched.start_index;
    while t_idx > 0 {
        let s_idx = t_idx.saturating_sub(stride_m);
        let bt = schedule.beta_bar_at(t_idx);
        let bs = schedule.beta_bar_at(s_idx);
        if bt == 0.0 {
            // flat start of the grid; nothing to remove
            break;
        }
        let x0_hat = predictor.predict_clean(&x, bt);
        x = ddim_step(&x, bt, bs, &x0_hat)?;
        t_idx = s_idx;
    }
    Ok(x)
}

/// Monte Carlo estimate of the prediction objective: expected squared error
/// `||predictor(x_t, b_t) - x_0||^2` under a uniformly random grid level and
/// the given clean-latent sampler.
pub fn predictor_loss<F>(
    predictor: &dyn DenoisePredictor,
    mut sample_clean: F,
    schedule: &DiffusionSchedule,
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<f64>
where
    F: FnMut(&mut RngStream) -> Vec<f64>,
{
    if n_samples < 100 {
        return Err(Error::InsufficientData { needed: 100, got: n_samples });
    }
    let mut total = 0.0;
    for _ in 0..n_samples {
        let x0 = sample_clean(rng);
        let i = 1 + rng.next_index(schedule.steps());
        let bt = schedule.beta_bar_at(i);
        let xt = forward_diffuse(&x0, bt, rng)?;
        let est = predictor.predict_clean(&xt, bt);
        total += est.iter().zip(&x0).map(|(e, x)| (e - x) * (e - x)).sum::<f64>();
    }
    Ok(total / n_samples as f64)
}
