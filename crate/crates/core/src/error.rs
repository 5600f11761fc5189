use thiserror::Error;

/// Errors produced by matrix validation, decomposition, and analysis.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("input is not square: {rows} rows, row {bad_row} has {bad_len} entries")]
    NonSquare {
        rows: usize,
        bad_row: usize,
        bad_len: usize,
    },

    #[error("matrix is empty (dimension must be at least 1)")]
    EmptyMatrix,

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum} (deviation {deviation} exceeds tolerance)")]
    RowSumViolation { row: usize, sum: f64, deviation: f64 },

    #[error("row {row} sums to zero and cannot be renormalized")]
    ZeroRow { row: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix source exhausted at index {index}")]
    SourceExhausted { index: usize },

    #[error("missing positive diagonal: entry ({index}, {index}) is not positive")]
    MissingPositiveDiagonal { index: usize },

    #[error("block ({k}, {l}) lies above the block diagonal and is structurally zero")]
    BlockAboveDiagonal { k: usize, l: usize },

    #[error("block of size {size} is too small for a projection (needs size >= 2)")]
    BlockTooSmall { size: usize },

    #[error("eigenvalue iteration failed to converge after {iterations} iterations")]
    EigenSolverFailure { iterations: usize },

    #[error("input does not match the Gantmacher form: {reason}")]
    FormMismatch { reason: String },

    #[error("product enumeration needs {needed} products, exceeding budget {budget}")]
    Explosion { needed: u128, budget: u64 },

    #[error(
        "column envelope of class {class} not monotone at window {window}, column {column}: \
         {prev} -> {curr}"
    )]
    MonotonicityViolation {
        window: usize,
        class: usize,
        column: usize,
        prev: f64,
        curr: f64,
    },

    #[error("{quantity} at window {window} is {measured}, above its bound {bound}")]
    BoundViolation {
        quantity: &'static str,
        window: usize,
        measured: f64,
        bound: f64,
    },

    #[error("delta {delta} is infeasible: a row with {support} positive entries caps it at {max}")]
    InvalidDelta {
        delta: f64,
        support: usize,
        max: f64,
    },

    #[error("parameter {name} = {value} is out of range ({expected})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
