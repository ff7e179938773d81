//! Crate-wide error type.

use thiserror::Error;

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configured column is absent from the CSV header.
    #[error("schema error: missing column '{column}'")]
    Schema { column: String },

    /// A data row could not be interpreted. `line` is the physical
    /// 1-based line number in the source file (the header is line 1).
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },

    /// The log contains no data rows or no cases.
    #[error("event log is empty")]
    EmptyLog,

    /// A process-model file could not be interpreted.
    #[error("model line {line}: {message}")]
    Model { line: usize, message: String },

    /// The model lacks an edge out of the start pseudo-node.
    #[error("model has no start")]
    ModelNoStart,

    /// The model lacks an edge into the end pseudo-node.
    #[error("model has no end")]
    ModelNoEnd,

    /// An outcome-policy file or value is invalid.
    #[error("outcome policy: {0}")]
    Policy(String),

    /// A synthetic-log configuration is invalid.
    #[error("synth config: {0}")]
    Config(String),

    /// A statistical precondition is violated (too few groups, an empty
    /// group, a degenerate sample, ...).
    #[error("statistics: {0}")]
    Stats(String),

    /// Report emission failed.
    #[error("report: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
