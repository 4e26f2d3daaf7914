use thiserror::Error;

/// Errors raised by the solver and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid physical parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("sobolev index {0} is outside (-3/2, 1/2)")]
    SigmaOutOfRange(f64),
    #[error("sobolev index -1/2 is the critical exponent and is not admissible")]
    CriticalExponent,
    #[error("omega^2 = lambda + nu|zeta|^2 vanishes (degenerate frequency)")]
    DegenerateFrequency,
    #[error("heat denominator vanishes at mode k = {k}")]
    DegenerateDenominator { k: usize },
    #[error("grid of {points} interior points cannot resolve K = {k} (need at least {needed})")]
    GridTooCoarse {
        points: usize,
        k: usize,
        needed: usize,
    },
    #[error("truncation order must be at least 1")]
    EmptyTruncation,
    #[error("profile length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operation requires a nonzero horizontal mode")]
    ZeroMode,
    #[error("operation requires the zero horizontal mode")]
    NonZeroMode,
    #[error("linear system is singular")]
    Singular,
    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {update:.3e})")]
    NotConverged { iterations: usize, update: f64 },
    #[error("signal is not causal: {0}")]
    NonCausal(String),
    #[error("time step too large: step-halving changed the solution by {change:.3e} (tolerance {tol:.1e})")]
    StepTooLarge { change: f64, tol: f64 },
    #[error("M_sigma requires sigma > -5/2, got {0}")]
    MsigmaDomain(f64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
