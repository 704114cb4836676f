//! Error type shared across the crate.
//!
//! Two error classes matter to callers: domain errors (malformed input,
//! out-of-range parameters, mixed scalar regimes) and convergence errors
//! (series that diverge at the requested index). The CLI maps them to
//! distinct exit codes, so the distinction is part of the public contract.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Index parts must be positive integers.
    #[error("index parts must be positive")]
    ZeroPart,

    /// A combinatorial operation (dual, run decomposition) needs an
    /// admissible index: non-empty with last part at least 2.
    #[error("index ({0}) is not admissible")]
    NotAdmissible(String),

    /// The series requested diverges: a one-sided sum over this index only
    /// converges when the index is admissible.
    #[error("series over index ({0}) diverges; the index is not admissible")]
    Divergent(String),

    /// A parameter is outside its allowed range.
    #[error("parameter {name} out of range: {value}")]
    ParamOutOfRange { name: &'static str, value: String },

    /// Arithmetic combined an exact rational with a floating-point value.
    #[error("cannot mix exact and floating-point scalars; convert explicitly")]
    RegimeMismatch,

    /// The operation is only defined for exact rational scalars.
    #[error("operation requires exact rational scalars")]
    ExactRegimeRequired,

    /// Division by an exact or floating-point zero.
    #[error("division by zero")]
    DivisionByZero,

    /// q-integers `[m]` are only defined for positive m here.
    #[error("q-integer requires m >= 1")]
    QIntegerAtZero,

    /// Floating-point precision must be at least 2 bits.
    #[error("precision must be at least 2 bits, got {0}")]
    PrecisionTooLow(u32),

    /// Truncation bounds must be positive.
    #[error("truncation bound must be at least 1")]
    ZeroTruncation,

    /// A textual index did not parse.
    #[error("cannot parse index from {0:?}: expected comma-separated positive integers")]
    ParseIndex(String),

    /// A textual scalar did not parse.
    #[error("cannot parse scalar from {0:?}: expected an integer, decimal, or p/q ratio")]
    ParseScalar(String),

    /// A transport move's precondition failed on the given state.
    #[error("move {mv} does not apply to state {state}")]
    MoveNotApplicable { mv: char, state: String },

    /// A proof trace violated its structural invariants.
    #[error("invalid proof trace: {0}")]
    InvalidTrace(String),

    #[error("invalid suite report: {0}")]
    InvalidReport(String),
}

impl Error {
    /// True for errors that mean "the requested series does not converge",
    /// as opposed to malformed input. The CLI reports these separately.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Divergent(_))
    }
}
