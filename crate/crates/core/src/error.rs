use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How far a two-stage run got before its data source ran dry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialReport {
    pub stage: Stage,
    pub pilot_sd: Option<f64>,
    pub n0: Option<u64>,
    pub n_final: Option<u64>,
    pub queries_used: u64,
    pub observations_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Pilot,
    StageOne,
    StageTwo,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("data source exhausted during {:?}: requested {requested}, {available} available", partial.stage)]
    RanOutOfData {
        requested: usize,
        available: usize,
        partial: Box<PartialReport>,
    },

    #[error("sequential scan did not stop within {cap} observations")]
    NonTermination { cap: u64 },

    #[error("sequential scan stream ended after {consumed} observations without stopping")]
    StreamEnded { consumed: u64 },

    #[error("replication {replication} failed: {source}")]
    Replication {
        replication: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid data at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag, used in CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::RanOutOfData { .. } => "ran_out_of_data",
            Error::NonTermination { .. } => "non_termination",
            Error::StreamEnded { .. } => "stream_ended",
            Error::Replication { .. } => "replication",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
