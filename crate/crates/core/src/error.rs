use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time {t} lies outside [{a}, {b}]")]
    OutOfDomain { t: f64, a: f64, b: f64 },

    #[error("value {v} lies outside [0, {max}]")]
    OutOfRange { v: f64, max: f64 },

    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("{0}")]
    InvalidFunction(String),

    #[error("step function partition [{start}, {end}] is not contained in [{a}, {b}]")]
    PartitionOutOfDomain { start: f64, end: f64, a: f64, b: f64 },

    #[error("integrand returned a non-finite value at t = {t}")]
    NonFiniteValue { t: f64 },

    #[error("bad grid: {0}")]
    BadGrid(String),

    #[error("sample paths do not share a grid containing the requested times")]
    GridMismatch,

    #[error("partition point {t} is not a grid point of the sample path")]
    PartitionNotOnGrid { t: f64 },

    #[error("pathwise Riemann-Stieltjes integration needs a bounded-variation certificate")]
    MissingBvCertificate,

    #[error("series expansion requires a centered sample path")]
    NotCentered,

    #[error("sampler produced a non-finite draw at index {index}")]
    NonFiniteDraw { index: usize },

    #[error("reference law has zero variance")]
    DegenerateReference,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("sign certificate rejected: {0}")]
    SignCertificate(String),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
