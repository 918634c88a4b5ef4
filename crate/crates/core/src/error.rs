use thiserror::Error;

/// Errors raised by the toolkit. Search failures that are part of an
/// operation's normal contract (budget exhausted, no linkage) are reported
/// through dedicated outcome types instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate vertex {0} in sequence")]
    DuplicateVertex(usize),

    #[error("endsequence mismatch: {0}")]
    EndsequenceMismatch(String),

    #[error("vertex {0} is shared outside the linking endsequences")]
    VertexOverlap(usize),

    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("invalid multigraph: {0}")]
    InvalidMultigraph(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("absorption failed: {0}")]
    Absorption(String),

    #[error("record version {found} does not match supported version {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
