use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is empty")]
    Empty,

    #[error("weight {index} is {value}: weights must be finite and non-negative")]
    InvalidWeight { index: usize, value: f64 },

    #[error("all weights are zero")]
    AllZero,

    #[error("ancestor {value} at position {index} is out of range for {len} particles")]
    AncestorOutOfRange { index: usize, value: usize, len: usize },

    #[error("invalid cumulative offspring vector: {0}")]
    InvalidCumulativeOffspring(String),

    #[error("offspring counts sum to {sum}, expected {len}")]
    OffspringSum { sum: usize, len: usize },

    #[error("ancestry does not satisfy the in-place predicate at position {index}")]
    PredicateViolation { index: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Metropolis step bound undefined for p* = {p_star}, N = {n}: lambda = {lambda} <= 0")]
    MetropolisBound { p_star: f64, n: usize, lambda: f64 },

    #[error("non-finite acceptance ratio {ratio} for particle {index}")]
    NonFiniteRatio { index: usize, ratio: f64 },

    #[error("log-weights are all -inf")]
    AllNegInfinite,

    #[error("log-weight {index} is {value}")]
    InvalidLogWeight { index: usize, value: f64 },

    #[error("weight collapse at step {step}: every particle has zero weight")]
    WeightCollapse { step: usize },

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
