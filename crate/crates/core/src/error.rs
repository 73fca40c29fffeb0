use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("node index {index} out of range for {n} nodes")]
    Index { index: usize, n: usize },

    #[error("label {label} at node {node} is not below class count {classes}")]
    Label {
        node: usize,
        label: usize,
        classes: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NotConverged { sweeps: usize, off_norm: f64 },

    #[error("interpolation nodes {0} and {1} coincide")]
    DuplicateNodes(usize, usize),

    #[error("vandermonde system with {nodes} nodes exceeds conditioning guard of {limit}")]
    Conditioning { nodes: usize, limit: usize },

    #[error("function evaluated to non-finite value {value} at {at}")]
    Evaluation { at: f64, value: f64 },

    #[error("signal is orthogonal to eigenvector {index} (|<u, x>| = {projection:e})")]
    Recovery { index: usize, projection: f64 },

    #[error("decay rate undefined: {0}")]
    UndefinedRate(String),

    #[error("optimizer: {0}")]
    Optimizer(String),

    #[error("tape already consumed by a previous backward pass")]
    StaleTape,

    #[error("training: {0}")]
    Training(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn dim(expected: impl ToString, got: impl ToString) -> Self {
        Error::Dimension {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by unreadable or malformed input files.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Io { .. } | Error::Json(_)
        )
    }
}
