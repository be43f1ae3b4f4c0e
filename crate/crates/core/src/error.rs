//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of two arguments do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix declared Hermitian deviates from its conjugate transpose.
    #[error("matrix is not Hermitian: max |A - A^H| element {0:.3e} exceeds 1e-12")]
    NotHermitian(f64),

    /// Cholesky pivot went non-positive; the system is not positive definite.
    #[error("matrix is not positive definite (pivot {pivot:.3e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    /// The linear system is too ill-conditioned to trust.
    #[error("singular system: condition estimate {cond:.3e} exceeds {limit:.1e}")]
    SingularSystem { cond: f64, limit: f64 },

    /// A statistic was requested on too few samples.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Input is degenerate for the requested operation (zero vector, constant series, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Binary/text format violation, reported at the offending byte offset.
    #[error("parse error at byte {offset}: {what}")]
    Format { offset: u64, what: String },

    /// The surrogate anchor makes the e > 1 coefficient denominator vanish.
    #[error("anchor singularity: c(1-e)*anchor^e + 1 = {denom:.3e} at anchor {anchor:.6e}")]
    AnchorSingularity { anchor: f64, denom: f64 },

    /// |h^H v| is numerically zero; phase compensation is undefined.
    #[error("degenerate link: |h^H v| = {gain:.3e} is below 1e-12")]
    DegenerateLink { gain: f64 },

    /// Exhaustive pair refinement is only feasible for small groups.
    #[error("group of size {size} exceeds the exhaustive pairing limit {limit}")]
    GroupTooLarge { size: usize, limit: usize },

    /// Logistic curve fitting could not produce a valid parameter set.
    #[error("logistic fit failed: {0}")]
    FitFailed(String),

    /// Catch-all for solver breakdowns.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad configuration or malformed input files,
    /// as opposed to numerical breakdowns at runtime.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::Format { .. } | Error::DimensionMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
