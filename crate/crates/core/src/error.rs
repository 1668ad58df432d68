use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Chimera coordinate {coord} for k = {k}")]
    InvalidCoordinate { coord: String, k: usize },

    #[error("node {node} is out of range (graph has {len} node slots)")]
    NodeOutOfRange { node: usize, len: usize },

    #[error("node {0} is faulty")]
    FaultyNode(usize),

    #[error("{0} is not an edge of the graph")]
    NotAnEdge(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("inconsistent cut vector: {0}")]
    InconsistentCut(String),

    #[error(
        "QUBO matrix entry ({row}, {col}) must be zero: only the strict upper triangle may be set"
    )]
    NotUpperTriangular { row: usize, col: usize },

    #[error("instance has {spins} enumerated spins, above the brute-force cap of {cap}")]
    AboveCap { spins: usize, cap: usize },

    #[error("sweep width {width} exceeds the dynamic-programming cap of {cap}")]
    WidthOverCap { width: usize, cap: usize },

    #[error("energy bound {0} risks overflow in 64-bit scaled arithmetic")]
    Overflow(i128),

    #[error("{0}")]
    OutOfRange(String),

    #[error("embedding rejected: {0}")]
    BrokenEmbedding(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
