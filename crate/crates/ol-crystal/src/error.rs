//! The crate-wide error type.

use thiserror::Error;

/// Errors raised by the arithmetic, polygon and crystal routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input value or datum does not satisfy its documented invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A division by a power of the uniformizer was requested for a value of smaller valuation.
    #[error("value of valuation {valuation}/{e} is not divisible by pi^{needed}")]
    NotDivisible { valuation: u32, needed: u32, e: u32 },
    /// A quantity could not be certified at the working precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    /// Polygon evaluation outside of `[0, width]`.
    #[error("abscissa {index} outside of [0, {width}]")]
    OutOfRange { index: usize, width: usize },
    /// Two polygons of different widths were compared or combined.
    #[error("polygon widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),
    /// An empty list was passed where at least one polygon is needed.
    #[error("empty list of polygons")]
    EmptyList,
    /// The iterated-valuation Newton estimate did not settle on a unique rational.
    #[error("newton oracle did not converge: {0}")]
    NoConvergence(String),
    /// The Hasse construction needs a datum with non-increasing levels for every embedding.
    #[error("the construction requires a datum with d_1 >= d_2 >= ... >= d_e for every embedding")]
    OrderedDatumRequired,
    /// A precondition of the requested computation does not hold for the given input.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// The crystal has no slope-zero part.
    #[error("the crystal has no etale part (minimal Newton slope is positive)")]
    EmptyEtalePart,
    /// The requested abscissa is not a Newton breakpoint lying on the Hodge polygon.
    #[error("abscissa {0} is not a Newton breakpoint on the Hodge polygon")]
    NotABreakContact(usize),
    /// The splitting procedure produced data that does not decompose the crystal.
    #[error("decomposition failed: {0}")]
    NotDecomposable(String),
    /// The crystal is not mu-ordinary for the given datum.
    #[error("the crystal is not mu-ordinary for the given datum")]
    NotMuOrdinary,
    /// A submodule over an artinian ring is not a direct summand.
    #[error("not a direct summand: {0}")]
    NotASummand(String),
    /// An induced map on exterior powers fails to kill the expected kernel.
    #[error("induced map is not well defined: {0}")]
    WellDefinednessFailure(String),
    /// A vector expected to lie in the image of Frobenius has no preimage.
    #[error("no Frobenius preimage: {0}")]
    NoPreimage(String),
    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Shorthand result type.
pub type Result<T> = std::result::Result<T, Error>;
