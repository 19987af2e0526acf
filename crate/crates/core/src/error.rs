//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by ingestion, task validation, and the search engine.
#[derive(Error, Debug)]
pub enum Error {
    /// A CSV cell could not be parsed (or was non-finite) at the given line.
    #[error("csv ingestion failed at line {line}: {message}")]
    Ingest { line: u64, message: String },

    /// I/O failure while reading input data.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A requested segment interval falls outside the series.
    #[error("segment [{start}, {}] out of bounds for series of length {series_len}", start + length - 1)]
    SegmentOutOfBounds {
        start: usize,
        length: usize,
        series_len: usize,
    },

    /// Series construction rejected the raw values.
    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    /// Segment length bounds are reversed.
    #[error("minimum segment length {l_min} exceeds maximum segment length {l_max}")]
    LengthBoundsReversed { l_min: usize, l_max: usize },

    /// Task parameters are inconsistent with the series or the index choice.
    #[error("invalid task: {0}")]
    InvalidTask(String),

    /// The non-overlap constraint cannot be satisfied: k*s segments of at
    /// least l_min samples need more room than the series offers.
    #[error(
        "infeasible task: k*s*l_min = {required} samples required, series has only {available}"
    )]
    Infeasible { required: usize, available: usize },

    /// Random initialization kept drawing overlapping solutions.
    #[error(
        "could not draw a non-overlapping solution in {attempts} attempts \
         (n = {series_len}, k*s = {segments}, l in [{l_min}, {l_max}]); \
         the task is infeasible or extremely tight"
    )]
    InitRetriesExhausted {
        attempts: u64,
        series_len: usize,
        segments: usize,
        l_min: usize,
        l_max: usize,
    },

    /// Engine parameters are out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
