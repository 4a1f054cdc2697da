//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error enum. Variants mirror the failure modes of the public
/// operations; the payload carries a human-readable detail string.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported pinch: {0}")]
    UnsupportedPinch(String),

    #[error("junction mismatch: {0}")]
    JunctionMismatch(String),

    #[error("grid/domain shape mismatch: {0}")]
    ShapeError(String),

    #[error("field not normalized: {0}")]
    NormalizationError(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("negative entries in nonnegative field: {0}")]
    SignError(String),

    #[error("stale or unconverged solver result: {0}")]
    StaleResult(String),

    #[error("coordinate out of range: {0}")]
    OutOfRange(String),

    #[error("far field underflows: {0}")]
    UnderflowRegion(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid cutoff function: {0}")]
    InvalidCutoff(String),

    #[error("unknown segment label: {0}")]
    UnknownSegment(String),

    #[error("bisection bracket failure: {0}")]
    BracketFailure(String),

    #[error("neck budget violation: {0}")]
    BudgetViolation(String),

    #[error("pinch precondition failure: {0}")]
    PinchPrecondition(String),

    #[error("invalid mass distribution: {0}")]
    InvalidDistribution(String),

    #[error("incomplete run: {0}")]
    IncompleteRun(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
