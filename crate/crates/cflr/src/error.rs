use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("symbol `{0}` is reserved")]
    ReservedSymbol(String),
    #[error("undeclared symbol id {0} referenced by grammar")]
    UndeclaredSymbol(u32),
    #[error("grammar is not in CNF: {0}")]
    NotCnf(String),
    #[error("edge label `{0}` is not a terminal of the grammar")]
    UnknownLabel(String),
    #[error("terminal `{0}` does not belong to the grammar")]
    UnknownTerminal(String),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("state {state} out of range for system with {n} states")]
    StateOutOfRange { state: usize, n: usize },
    #[error("{0} must be positive")]
    ZeroParameter(&'static str),
    #[error("graph is cyclic; a DAG is required")]
    Cyclic,
    #[error("negative edge weight {weight} on edge {edge}; weighted solving requires nonnegative weights")]
    NegativeWeight { edge: usize, weight: i64 },
    #[error("pushdown system has no stack depth bound; the BFS engine requires one")]
    MissingDepthBound,
    #[error("vector dimension {0} too small; the gadget needs d >= 2")]
    DimensionTooSmall(usize),
    #[error("edge color {color} out of range; colors must be < n^2 = {limit}")]
    ColorOutOfRange { color: u64, limit: u64 },
    #[error("subdivision length {k} exceeds the configured cap {cap}: the tuple alphabet would hold up to {estimate} symbols")]
    SubdivisionTooLong { k: usize, cap: usize, estimate: u64 },
    #[error("malformed subdivision graph: {0}")]
    BadSubdivision(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
