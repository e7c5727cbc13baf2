//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("csv error at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("formula error: {0}")]
    Formula(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("design matrix is rank deficient; collinear columns: {0:?}")]
    RankDeficient(Vec<String>),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("outcome `{0}` takes a single value; both classes are required")]
    SingleClassOutcome(String),

    #[error("need more observations than parameters: n = {n}, k = {k}")]
    TooFewObservations { n: usize, k: usize },

    #[error("covariance diagonal entry {index} is negative ({value})")]
    NegativeVariance { index: usize, value: f64 },

    #[error("estimated residual covariance is singular (residual correlation {corr})")]
    SingularSigma { corr: f64 },

    #[error("requested sample of {requested} exceeds eligible population of {eligible}")]
    SampleTooLarge { requested: usize, eligible: usize },

    #[error("generated outcome for equation {equation} is degenerate (all {value})")]
    DegenerateOutcome { equation: usize, value: u8 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
