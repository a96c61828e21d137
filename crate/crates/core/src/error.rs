use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrError {
    #[error("dimension {dim} exceeds the dimension cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("index error: {0}")]
    Index(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("unknown state id `{id}` (known: {known})")]
    UnknownState { id: String, known: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = CorrError> = std::result::Result<T, E>;
