use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{0}: empty input")]
    EmptyInput(PathBuf),

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("label vector has length {labels}, graph has {vertices} vertices")]
    LengthMismatch { labels: usize, vertices: usize },

    #[error("class {0} has no labeled vertices; class ids must be contiguous in 1..=K")]
    EmptyClass(usize),

    #[error("no known labels (every vertex is labeled 0)")]
    NoKnownLabels,

    #[error("class {class} has {count} labeled vertices; at least {required} are needed")]
    ClassTooSmall {
        class: usize,
        count: usize,
        required: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("dense oracle limited to {limit} vertices, graph has {n}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("need at least {required} values, got {got}")]
    TooFewValues { required: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
