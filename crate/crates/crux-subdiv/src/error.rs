use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,
    #[error("graph has no edges")]
    NoEdges,
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exact check infeasible: {n} vertices exceeds threshold {threshold}")]
    ExactInfeasible { n: usize, threshold: usize },
    #[error("graph on {n} vertices exceeds the exact crux threshold {threshold}; use crux_bounds")]
    CruxTooLarge { n: usize, threshold: usize },
    #[error("graph on {n} vertices exceeds the oracle threshold {threshold}")]
    OracleTooLarge { n: usize, threshold: usize },
    #[error("empty size range")]
    EmptySizeRange,
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("json error: {0}")]
    Json(String),
    #[error("extraction exceeded {cap} iterations")]
    IterationCap { cap: usize, best: Box<crate::graph::Subgraph> },
    #[error("guarantee violated: {0}")]
    GuaranteeViolated(String),
}

/// Errors from the edge-list text format; each failure mode is distinct.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    OutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: reversed edge {u} {v} (expected u < v)")]
    ReversedEdge { line: usize, u: usize, v: usize },
    #[error("header declares {declared} edges but {found} were given")]
    EdgeCount { declared: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
