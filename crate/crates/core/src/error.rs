use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("fitness value is NaN")]
    NanFitness,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("gene {index} = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("operator {op} expects arity {expected} but received {actual} argument(s)")]
    ArityMismatch {
        op: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("malformed operator tree: {0}")]
    MalformedTree(String),
    #[error("cannot parse operator tree: {0}")]
    Parse(String),
    #[error("invalid selection weights: {0}")]
    InvalidWeights(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trace carries no operator rate records")]
    MissingRates,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
