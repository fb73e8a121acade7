use thiserror::Error;

/// Errors raised by the belief-updating library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("state space must contain at least one state")]
    EmptySpace,

    #[error("duplicate or empty label `{0}`")]
    BadLabel(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("length mismatch in {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("distributions live on different state spaces")]
    SpaceMismatch,

    #[error("invalid probability vector `{field}`: {reason}")]
    InvalidProbabilities { field: String, reason: String },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("inconsistent scenario: {0}")]
    Inconsistent(String),

    #[error(
        "entropy preference mu = {0} is in the degenerate regime (mu >= 1); use the concave solver"
    )]
    DegenerateRegime(f64),

    #[error("function value at state {index} is not finite on the support")]
    NonFiniteOnSupport { index: usize },

    #[error("observation {index}: {reason}")]
    BadObservation { index: usize, reason: String },

    #[error("parameters are not identified: {0}")]
    Unidentified(String),

    #[error("sequential update failed at step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<BeliefError>,
    },
}

pub type Result<T> = std::result::Result<T, BeliefError>;
