use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input text (JSON, CSV).
    Parse,
    /// Well-formed input that breaks a structural invariant.
    Invariant,
    /// Combination aborted because the operands are in total conflict.
    Conflict,
    Other,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("frame of discernment must contain at least one label")]
    EmptyFrame,
    #[error("label `{0}` appears more than once in the frame")]
    DuplicateLabel(String),
    #[error("frame has {len} labels, the limit for this operation is {max}")]
    FrameTooLarge { len: usize, max: usize },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label index {index} is out of range for a frame of {len} labels")]
    LabelIndex { index: usize, len: usize },
    #[error("focal sets must be non-empty")]
    EmptyFocal,
    #[error("focal set {0} is listed more than once")]
    DuplicateFocal(String),
    #[error("permutation events must be non-empty")]
    EmptyEvent,
    #[error("label `{0}` is repeated inside a permutation event")]
    RepeatedLabel(String),
    #[error("permutation event {0} is listed more than once")]
    DuplicateEvent(String),
    #[error("mass {0} is not a finite value in [0, 1]")]
    InvalidMass(f64),
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("operands are defined on different frames")]
    FrameMismatch,
    #[error("total conflict between sources (K = {0})")]
    TotalConflict(f64),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("{0}")]
    Shape(String),
    #[error("class `{label}` has {count} samples, fewer than the {folds} folds requested")]
    ClassTooSmall {
        label: String,
        count: usize,
        folds: usize,
    },
    #[error("{path}: row {row}, column {column}: {message}")]
    Csv {
        path: String,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Dataset { path: String, message: String },
    #[error("refusing to overwrite existing file {}", .0.display())]
    OutputExists(PathBuf),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Json(_) | Error::Csv { .. } | Error::Dataset { .. } => ErrorKind::Parse,
            Error::TotalConflict(_) => ErrorKind::Conflict,
            Error::Io(_) | Error::OutputExists(_) => ErrorKind::Other,
            _ => ErrorKind::Invariant,
        }
    }

    pub(crate) fn out_of_range(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::OutOfRange { name, value, range }
    }
}
