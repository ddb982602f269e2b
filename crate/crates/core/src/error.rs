use std::path::PathBuf;

use thiserror::Error;

/// Which side of a segment pair an input problem refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Hypothesis,
    Reference,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Hypothesis => f.write_str("hypothesis"),
            Side::Reference => f.write_str("reference"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {side} is empty after tokenization")]
    EmptySide { side: Side },

    #[error("degenerate input: zero-length {side}")]
    ZeroLength { side: Side },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown preset `{requested}`; available presets: {available}")]
    UnknownPreset { requested: String, available: String },

    #[error("preset file {path}: {message}")]
    PresetFile { path: PathBuf, message: String },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: {}", summarize_rows(.issues))]
    InvalidRows { path: PathBuf, issues: Vec<RowIssue> },

    #[error("segment {seg_id} (system {system_id}): {source}")]
    Segment {
        seg_id: String,
        system_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("gold column `{column}` missing for segment {seg_id} (system {system_id})")]
    MissingGold {
        column: String,
        seg_id: String,
        system_id: String,
    },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("length mismatch: {left} vs {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input sequence")]
    EmptySequence,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("correlation undefined: zero variance")]
    ZeroVariance,

    #[error("invalid gold scale: {0}")]
    InvalidScale(String),

    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("objective returned non-finite value {0}")]
    NonFiniteObjective(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// A row-level ingestion problem, with the 1-based physical line number.
#[derive(Debug, Clone, PartialEq)]
pub struct RowIssue {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for RowIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn summarize_rows(issues: &[RowIssue]) -> String {
    match issues {
        [] => "invalid rows".to_string(),
        [one] => one.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more invalid rows)", rest.len()),
    }
}

/// Broad failure class, used for CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Runtime,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParams(_)
            | Error::UnknownPreset { .. }
            | Error::InvalidScale(_)
            | Error::InvalidSpace(_)
            | Error::InvalidConfig(_) => ErrorClass::Usage,
            Error::Io { .. } | Error::NonFiniteObjective(_) => ErrorClass::Runtime,
            Error::Segment { source, .. } => source.class(),
            _ => ErrorClass::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
