use thiserror::Error;

/// Crate-wide error type. Variant names double as the stable identifiers
/// surfaced by the CLI and the interchange loader.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HfrError {
    #[error("BadCount: point count {0} is not a positive multiple of 4")]
    BadCount(usize),

    #[error("NotFixedPointFree: point {0} is matched to itself or mentioned twice")]
    NotFixedPointFree(usize),

    #[error("NotConnectedAfterSurgery: surgery on the matching yields {0} circles, expected 1")]
    NotConnectedAfterSurgery(usize),

    #[error("NotSymmetric: matching does not commute with the reflection (M(tau({0})) != tau(M({0})))")]
    NotSymmetric(usize),

    #[error("NotRealPMC: operation requires a reflection-compatible circle")]
    NotRealPmc,

    #[error("AlgebraMismatch: {0}")]
    AlgebraMismatch(String),

    #[error("IdempotentMismatch: {0}")]
    IdempotentMismatch(String),

    #[error("DSquaredNonzero: boundary map does not square to zero (witness column {0})")]
    DSquaredNonzero(usize),

    #[error("CapExceeded: coefficient depth exceeded cap {0}; boundedness unknown (likely unbounded)")]
    CapExceeded(usize),

    #[error("NotClosed: {0} arrows leave the requested generator subset (first: {1})")]
    NotClosed(usize, String),

    #[error("RelationFailure: {0}")]
    RelationFailure(String),

    #[error("UnboundedPair: neither factor of the box tensor is bounded")]
    UnboundedPair,

    #[error("NonorientableQuotient: the quotient surface of this circle is nonorientable")]
    NonorientableQuotient,

    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),

    #[error("SinkFailure: {0}")]
    SinkFailure(String),

    #[error("ParseError: {0}")]
    ParseError(String),

    #[error("ValidationError: {0}")]
    ValidationError(String),

    #[error("UsageError: {0}")]
    UsageError(String),
}

pub type Result<T> = std::result::Result<T, HfrError>;
