use thiserror::Error;

use crate::frames::Event;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {0}: malformed event record")]
    MalformedLine(usize),

    #[error("line {0}: timestamp decreases")]
    NonMonotonicTimestamp(usize),

    #[error("event at t={} ({}, {}) lies outside the sensor", .0.t, .0.x, .0.y)]
    EventOutOfBounds(Event),

    #[error("coordinate ({row}, {col}) outside {rows}x{cols}")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("count {count} exceeds the {cells} cells of the window")]
    InvalidCount { count: usize, cells: usize },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bad PBM data: {0}")]
    Pbm(String),

    #[error("bad CSV record at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
