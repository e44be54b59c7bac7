//! Error type shared by every module of the crate.
//!
//! All failures are reported through [`Error`]; no operation panics on bad
//! numeric input. Messages are single-line so the CLI can surface them
//! verbatim as diagnostics.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Working precision below the supported floor.
    #[error("precision must be at least {min} significant digits (got {got})")]
    PrecisionTooLow { got: u32, min: u32 },

    /// A numeric literal that does not parse as a finite decimal number.
    #[error("invalid numeric literal `{text}`")]
    InvalidNumber { text: String },

    /// Jets combined with mismatched expansion point or order.
    #[error("jet contract violation: {detail}")]
    JetContract { detail: String },

    /// Jet division where the divisor's leading coefficient is (near-)zero.
    #[error("jet division by (near-)zero leading coefficient, |c0| = {magnitude}")]
    JetDivisionByZero { magnitude: String },

    /// Jet sqrt/ln whose leading coefficient lies on the principal branch cut.
    #[error("jet domain error: leading coefficient {value} lies on the branch cut")]
    JetBranchCut { value: String },

    /// Expression syntax error with a byte position into the source text.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Expression evaluation hit a domain violation (division by zero, log of
    /// a nonpositive value, sqrt on the branch cut, ...).
    #[error("domain error in `{subexpr}` at x = {x}: {detail}")]
    ExprDomain {
        subexpr: String,
        x: String,
        detail: String,
    },

    /// The coefficient function is not strictly positive on the interval.
    #[error("nonpositive coefficient (turning point): a({x}) = {value} <= 0")]
    NonpositiveCoefficient { x: String, value: String },

    /// Interval endpoints out of order.
    #[error("interval must satisfy lo < hi (got [{lo}, {hi}])")]
    BadInterval { lo: String, hi: String },

    /// Evaluation requested outside the series' interval.
    #[error("x = {x} outside interval [{lo}, {hi}] (no extrapolation)")]
    OutsideInterval { x: String, lo: String, hi: String },

    /// Value vector does not match the grid it is paired with.
    #[error("value-vector length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// The singular-perturbation parameter is outside (0, 1).
    #[error("epsilon must satisfy 0 < eps < 1 (got {eps})")]
    BadEpsilon { eps: String },

    /// Truncation order beyond what the phase table stores.
    #[error("truncation order {n} exceeds table N_max = {n_max}")]
    OrderOutOfRange { n: usize, n_max: usize },

    /// Initial-condition matching denominator below the safety threshold.
    #[error("ill-conditioned initial-condition matching: |D| = {magnitude} below threshold {threshold}")]
    IllConditionedMatching { magnitude: String, threshold: String },

    /// A WKB exponent grew past the overflow guard; the configuration is not
    /// in the oscillatory regime the solver targets.
    #[error("exponent real part {re} exceeds the overflow guard {limit}; configuration is not oscillatory")]
    ExponentOverflow { re: String, limit: String },

    /// Spectral tail coefficients exceed the resolution threshold.
    #[error("unresolved spectral representation at M = {m}: raise the Chebyshev degree")]
    Unresolved { m: usize },

    /// A truncation-selection routine needs a larger table.
    #[error("phase table too small: {detail}")]
    TableTooSmall { detail: String },

    /// Least-term selection landed on the last stored order.
    #[error("truncation argmin hit the table boundary N_max = {n_max}; raise N_max")]
    BoundaryArgmin { n_max: usize },

    /// Norm-growth fit attempted on (near-)degenerate data.
    #[error("norm-growth fit needs at least {min} usable points (got {got})")]
    DegenerateFit { got: usize, min: usize },

    /// Airy-function argument outside the series' certified range.
    #[error("airy evaluation out of range: |t| = {t} exceeds T_max = {t_max} (cancellation limit)")]
    AiryOutOfRange { t: String, t_max: String },

    /// The brute-force integrator could not reach the requested tolerance.
    #[error("oracle failure: {detail}")]
    OracleFailure { detail: String },

    /// Approximation and oracle sampled on different grids.
    #[error("grid mismatch: {detail}")]
    GridMismatch { detail: String },

    /// A request outside the supported configuration space.
    #[error("unsupported configuration: {detail}")]
    Unsupported { detail: String },

    /// Output could not be written.
    #[error("i/o error: {detail}")]
    Io { detail: String },
}
