use thiserror::Error;

use crate::norms::SumSpaceSplit;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generator count mismatch: {left} vs {right}")]
    GeneratorMismatch { left: usize, right: usize },

    #[error("at most {max} Clifford generators are supported, got {got}")]
    TooManyGenerators { got: usize, max: usize },

    #[error("invalid basis subset {0:?}: indices must be strictly increasing and within 1..=n")]
    InvalidBlade(Vec<usize>),

    #[error("cannot invert the zero vector")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("band mismatch: {left} vs {right}")]
    BandMismatch { left: usize, right: usize },

    #[error("frequency {index:?} lies outside band {band}")]
    OutOfBand { index: Vec<i64>, band: usize },

    #[error("grid with {points} points per axis aliases band {band} (need at least {})", 2 * band + 1)]
    Aliasing { points: usize, band: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("input has nonzero mean (|coefficient at 0| = {0:e})")]
    NonZeroMean(f64),

    #[error("optimizer stopped after {iterations} iterations with gap {gap:e}")]
    NonConvergence {
        iterations: usize,
        gap: f64,
        partial: Box<SumSpaceSplit>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
