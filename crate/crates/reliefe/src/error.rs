//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by matrix kernels, the ranking pipeline and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A value that must be finite was NaN or infinite.
    #[error("invalid value: {0}")]
    InvalidValue(String),

    /// A matrix shape that does not support the requested operation.
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// Cosine distance requested for a row with zero norm.
    #[error("degenerate row {0}: zero norm under cosine metric")]
    DegenerateRow(usize),

    /// Input carries no information (e.g. an all-zero matrix).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Too many samples without enough positive-distance neighbors.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Sample cap smaller than the number of distinct target values.
    #[error("sample cap {cap} below the {distinct} distinct target values")]
    InsufficientCap { cap: usize, distinct: usize },

    /// Graph edge weight outside [0, 1].
    #[error("invalid edge weight {value} at ({row}, {col})")]
    InvalidWeight { row: usize, col: usize, value: f64 },

    /// Layout optimization produced a non-finite coordinate.
    #[error("layout diverged: non-finite coordinate for node {0}")]
    LayoutDiverged(usize),

    /// A classification target with a single class cannot be ranked.
    #[error("single-class targets: class priors leave no misses")]
    SingleClass,

    /// Neighborhood statistics over an empty neighbor set.
    #[error("empty neighborhood")]
    EmptyNeighborhood,

    /// A binary label distance applied to a non-binary row.
    #[error("invalid label row: {0}")]
    InvalidLabelRow(String),

    /// Stratified fold assignment left a training fold without a class.
    #[error("stratification failed: {0}")]
    StratificationFailed(String),

    /// Relative F1 undefined because the all-features baseline is zero.
    #[error("baseline F1 is zero; relative curve undefined")]
    BaselineDegenerate,

    /// Too few curve points for Simpson integration.
    #[error("need at least 3 curve points, got {0}")]
    InsufficientPoints(usize),

    /// Configuration rejected before running the pipeline.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Malformed input file, with the 1-based line it was found on.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
