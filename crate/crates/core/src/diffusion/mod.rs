//! Diffusion-style denoising of received latents: noise schedules, the
//! deterministic reverse sampler, step matching against observed link
//! quality, and pluggable clean-latent predictors.

pub mod predictor;
pub mod sampler;
pub mod schedule;

pub use predictor::{
    DenoisePredictor, GaussianMmsePredictor, PredictorHandle, PriorCovariance, ZeroPredictor,
};
pub use sampler::{
    ddim_coefficients, ddim_step, denoise, forward_diffuse, forward_skip, predictor_loss,
    step_match, StepMatch,
};
pub use schedule::{DiffusionSchedule, ScheduleShape};
