use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("edge ({i}, {j}) has invalid weight {weight}; weights must be finite and > 0")]
    BadEdgeWeight { i: usize, j: usize, weight: f64 },

    #[error("self-loop on node {node} requires explicit self-loop construction")]
    SelfLoopNotAllowed { node: usize },

    #[error("node {node} is isolated (degree 0); plain normalization is undefined")]
    IsolatedNode { node: usize },

    #[error("node {node} became isolated after clamping negative denoised weights")]
    IsolatedAfterClamp { node: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix is not symmetric (max |M - M^T| entry = {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },

    #[error("matrix size {n} exceeds dense cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("alpha = {alpha} outside the open interval (0, 1) required by the closed form")]
    AlphaOutOfRange { alpha: f64 },

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("correlation undefined: {0}")]
    DegenerateCorrelation(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("edge noise infeasible: {0}")]
    EdgeNoiseInfeasible(String),

    #[error("class {class} has no nodes in the training mask")]
    EmptyTrainClass { class: usize },

    #[error("mask \"{0}\" is empty")]
    EmptyMask(&'static str),

    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("failed to generate a connected graph after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("class {class} has only {available} nodes, {requested} requested")]
    InsufficientClassNodes {
        class: usize,
        available: usize,
        requested: usize,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
