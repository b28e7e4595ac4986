use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PlaceError>;

#[derive(Debug, Error)]
pub enum PlaceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: referenced file does not exist")]
    MissingFile { path: PathBuf },

    #[error("{path}:{line}: malformed header: {message}")]
    BadHeader {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: unknown node `{name}`")]
    UnknownNode {
        path: PathBuf,
        line: usize,
        name: String,
    },

    #[error("{path}:{line}: declared {what} = {declared}, found {found}")]
    CountMismatch {
        path: PathBuf,
        line: usize,
        what: &'static str,
        declared: usize,
        found: usize,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("node {node} lies entirely outside the density grid")]
    OutsideGrid { node: usize },
}

impl PlaceError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PlaceError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag, used in the metrics error field.
    pub fn kind(&self) -> &'static str {
        match self {
            PlaceError::Io { .. } => "io",
            PlaceError::MissingFile { .. } => "missing_file",
            PlaceError::BadHeader { .. } => "bad_header",
            PlaceError::Syntax { .. } => "syntax",
            PlaceError::UnknownNode { .. } => "unknown_node",
            PlaceError::CountMismatch { .. } => "count_mismatch",
            PlaceError::Infeasible(_) => "infeasible",
            PlaceError::InvalidArgument(_) => "invalid_argument",
            PlaceError::NonFinite(_) => "non_finite",
            PlaceError::OutsideGrid { .. } => "outside_grid",
        }
    }
}
