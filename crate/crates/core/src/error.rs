use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("node {node} out of range for a graph with {nodes} nodes")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("no connected sample after {attempts} attempts")]
    GenerationFailed { attempts: u32 },
    #[error("source and destination must differ")]
    SameEndpoints,
    #[error("requested {requested} failed links but the graph has only {available}")]
    TooManyFailures { requested: usize, available: usize },
}
