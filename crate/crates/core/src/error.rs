use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid offspring distribution: {0}")]
    InvalidDistribution(String),

    #[error("offspring polynomial must have degree >= 2, got {0}")]
    DegenerateDegree(usize),

    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series has constant term {expected_desc}; got {found}")]
    ConstantTerm { expected_desc: &'static str, found: String },

    #[error("iteration diverged at z = {z} after {iterations} steps (point outside the filled Julia set)")]
    DivergenceDetected { z: String, iterations: usize },

    #[error("iteration did not reach tolerance within {max_iter} steps at z = {z}")]
    MaxIterExceeded { z: String, max_iter: usize },

    #[error("K* diverges on the line Im z = -{shift}; lower the shift fraction")]
    ShiftTooLarge { shift: f64 },

    #[error("Fourier coefficients did not converge within {samples} samples")]
    NotConverged { samples: usize },

    #[error("index {index} outside computed range 0..={max}")]
    OutOfRange { index: i64, max: usize },

    #[error("gamma function pole at {0}")]
    PoleAtNonpositiveInteger(String),

    #[error("term overflow: log-magnitude {0} exceeds 700")]
    Overflow(f64),

    #[error("recurrence is ill-conditioned at n = {n}: p1 - p1^n = {denominator:e}")]
    IllConditioned { n: usize, denominator: f64 },

    #[error("operation needs a degree-{expected} polynomial, got degree {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("psi expansion has order {have}, need at least {need}")]
    InsufficientPsiOrder { have: usize, need: usize },

    #[error("spectrum holds {have} coefficients, need {need}")]
    SpectrumTooShort { have: usize, need: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
