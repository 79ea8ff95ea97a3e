use thiserror::Error;

/// Errors raised by system construction, solvers and verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShadowError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("point does not belong to space {space}: {detail}")]
    SpaceMismatch { space: String, detail: String },

    #[error("two-point ratio is undefined for equal points")]
    DegeneratePair,

    #[error("certificate violated: {0}")]
    Certificate(String),

    #[error("matrix is not invertible: {0}")]
    Inversion(String),

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient data: need at least {needed} strictly positive entries, found {found}")]
    InsufficientData { needed: usize, found: usize },
}

pub type Result<T, E = ShadowError> = std::result::Result<T, E>;
