//! Error taxonomy shared by every module.
//!
//! Variants are split into three broad families that the CLI maps to exit
//! codes: configuration problems (exit 2), numerical failures (exit 3), and
//! I/O (exit 3). Library callers match on the variant directly.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not positive definite (factorization failed at jitter {jitter:.3e})")]
    NotPositiveDefinite { jitter: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate design points: minimum pairwise distance {d_min:.3e} <= 1e-12")]
    DuplicatePoints { d_min: f64 },
    #[error("evaluation point coincides with node {index} within 1e-15")]
    AtNode { index: usize },
    #[error("input vector is not strictly increasing at position {index}")]
    NotSorted { index: usize },
    #[error("need at least {need} points, got {got}")]
    TooSmall { need: usize, got: usize },
    #[error("bisection bracket [{lo:.6}, {hi:.6}] has no sign change for root {j}")]
    BracketFailure { j: usize, lo: f64, hi: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("query {x:.6} outside the interpolation range [{lo:.6}, {hi:.6}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("Monte Carlo quadrature in dimension {d} requires an Rng")]
    MissingRng { d: usize },
    #[error("no snapshot recorded at time {time}")]
    MissingSnapshot { time: f64 },
    #[error("training diverged: loss {loss:.3e} exceeds 1e3 x initial loss {initial:.3e}")]
    DivergenceDetected { loss: f64, initial: f64 },
    #[error("unknown truth function `{0}`")]
    UnknownTruth(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI uses for this error: 2 for configuration problems,
    /// 3 for numerical or I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigParse { .. } | Error::UnknownScenario(_) | Error::UnknownTruth(_) => 2,
            _ => 3,
        }
    }
}
