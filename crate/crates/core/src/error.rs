use alloc::string::String;

/// Everything that can go wrong inside the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix dimension {0} is outside 1..=8")]
    Dimension(usize),
    #[error("expected {expected} matrix entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("eigenvalue iteration did not converge (degenerate input?)")]
    NoConvergence,
    #[error("slope fit needs at least two distinct abscissae")]
    DegenerateFit,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("non-hyperbolic matrix: an eigenvalue has modulus {0} (within tolerance of 1)")]
    NonHyperbolic(f64),
    #[error("{0} is not a smooth system")]
    NotSmooth(&'static str),
    #[error("reference measure {measure} is not valid for {system}")]
    MeasureMismatch { measure: &'static str, system: &'static str },
    #[error("folding estimator requires closed-form measure Jacobian")]
    JacobianUnavailable,
    #[error("insufficient resolution: every ball was skipped at every radius")]
    InsufficientResolution,
    #[error("unsupported system kind for {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
