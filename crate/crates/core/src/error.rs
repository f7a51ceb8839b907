use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GstError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("exact enumeration refused: n = {n} exceeds cap {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("conditioning event has probability zero")]
    ZeroProbabilityCondition,

    #[error("operation requires the GST setting (r = 1/2, p = q)")]
    NotGst,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("methods disagree: {0}")]
    Disagreement(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("point is not in GST_n: {0}")]
    NotInGst(String),
}

pub type Result<T> = std::result::Result<T, GstError>;
