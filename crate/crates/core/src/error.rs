use thiserror::Error;

use crate::graph::{EdgeKey, NodeId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list contains no nodes")]
    EmptyInput,

    #[error("graph is not connected; take the largest connected component first")]
    Disconnected,

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("edge {0} already present")]
    DuplicateEdge(EdgeKey),

    #[error("node {0} out of range for graph with {1} nodes")]
    NodeOutOfRange(NodeId, usize),

    #[error("transmission probability must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("sample count must be at least 1")]
    ZeroSamples,

    #[error("exact enumeration refused: {edges} edges exceeds cap of {cap}")]
    OracleCap { edges: usize, cap: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
