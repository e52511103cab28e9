use std::io;

use thiserror::Error;

/// Errors produced anywhere in the ingest → PDR → matching → evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: timestamp {t} does not increase past the previous sample ({prev})")]
    Ordering { line: u64, t: f64, prev: f64 },

    #[error("input contains no samples")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid route: {0}")]
    Validation(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("time {t} s lies outside the stream range [{start}, {end}] s")]
    Range { t: f64, start: f64, end: f64 },

    #[error("no steps detected; trajectory would be empty")]
    EmptyTrajectory,

    #[error("turn/corner mismatch: {turns} turns vs {corners} corners")]
    TurnMismatch { turns: usize, corners: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("reduction ratio undefined: baseline mean error is zero")]
    UndefinedRatio,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
