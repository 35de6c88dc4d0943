use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: node id must be positive")]
    NonPositiveId { line: usize },
    #[error("line {line}: self-loop on node {id}")]
    SelfLoop { line: usize, id: u64 },
    #[error("duplicate node id {0}")]
    DuplicateId(u64),
    #[error("node id {id} exceeds the identifier bound {bound}")]
    IdOutOfRange { id: u64, bound: u64 },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("precondition of {op} violated: {detail}")]
    Precondition { op: &'static str, detail: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{what} exceeds the configured cap ({size} > {cap})")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("partial rounding failed verification after {tries} tries")]
    RetriesExhausted { tries: usize },
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Precondition { op, detail: detail.into() }
}
