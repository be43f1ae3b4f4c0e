//! Numerics kernels: complex linear algebra, seeded random streams, and the
//! statistical test primitives shared by the rest of the crate.

pub mod complex;
pub mod rng;
pub mod stats;

pub use complex::{hermitian_solve, inner, norm_sq, norm_sq_real, CMat, CholFactor, C64};
pub use rng::{draw_complex_gaussian, mix64, RngStream};
pub use stats::{excess_kurtosis, ks_normal, normal_cdf, sample_autocov, GaussianityReport};
