//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block label {label} outside 1..={blocks}")]
    InvalidMultiIndex { label: usize, blocks: usize },

    #[error("grading mismatch between operands")]
    SpecMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("times must be strictly increasing (violated at index {index})")]
    NonIncreasingTimes { index: usize },

    #[error("time {time} is not a grid point")]
    OffGrid { time: f64 },

    #[error("incompatible grids")]
    IncompatibleGrids,

    #[error("ordered shuffle block sizes must be positive")]
    ZeroBlock,

    #[error("element is not supported on length-1 words only")]
    NotLevelOne,

    #[error("element has no logarithm: scalar slot is {scalar}, expected 1")]
    NotGroupLike { scalar: f64 },

    #[error(
        "sewing did not converge within depth {max_depth}; last two level distances {previous:e}, {last:e}"
    )]
    SewDiverged {
        max_depth: usize,
        previous: f64,
        last: f64,
    },

    #[error("missing derivative level {degree}")]
    MissingLevel { degree: String },

    #[error("gamma[{index}] = {gamma} violates gamma > 1 - 1/p = {bound}")]
    IntegrabilityPrecondition {
        index: usize,
        gamma: f64,
        bound: f64,
    },

    #[error("almost-integral exponent theta = {theta} <= 1 cannot be sewn")]
    NonconvergentExponent { theta: f64 },

    #[error("Picard iteration did not contract within {max_iter} steps; distances {distances:?}")]
    PicardDiverged {
        max_iter: usize,
        distances: Vec<f64>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
