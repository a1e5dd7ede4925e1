use std::fmt;
use std::io;

/// Everything that can go wrong between reading a CSV and writing a model.
#[derive(Debug)]
pub enum Error {
    Io(io::Error),
    /// A required column is absent from the CSV header, or the schema file is malformed.
    Schema(String),
    /// A data row could not be turned into a record. `line` is 1-based and counts the header.
    Row {
        line: u64,
        column: String,
        message: String,
    },
    EmptyInput(String),
    ZeroVariance(String),
    Config(String),
    Shape(String),
    NumericInput(String),
    NumericDivergence {
        epoch: usize,
        message: String,
    },
    InsufficientHistory(String),
    SlotRange(String),
    Artifact(String),
    ArtifactVersion {
        found: u64,
        supported: u64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "I/O error: {e}"),
            Self::Schema(s) => write!(f, "schema error: {s}"),
            Self::Row {
                line,
                column,
                message,
            } => write!(f, "row error at line {line}, column {column}: {message}"),
            Self::EmptyInput(s) => write!(f, "empty input: {s}"),
            Self::ZeroVariance(c) => write!(f, "zero variance in column {c}"),
            Self::Config(s) => write!(f, "config error: {s}"),
            Self::Shape(s) => write!(f, "shape error: {s}"),
            Self::NumericInput(s) => write!(f, "non-finite input: {s}"),
            Self::NumericDivergence { epoch, message } => {
                write!(f, "numeric divergence in epoch {epoch}: {message}")
            }
            Self::InsufficientHistory(s) => write!(f, "insufficient history: {s}"),
            Self::SlotRange(s) => write!(f, "slot out of range: {s}"),
            Self::Artifact(s) => write!(f, "model artifact error: {s}"),
            Self::ArtifactVersion { found, supported } => write!(
                f,
                "model artifact error: unsupported format_version {found} (supported: {supported})"
            ),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        if let Self::Io(e) = self {
            Some(e)
        } else {
            None
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
