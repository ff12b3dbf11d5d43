use thiserror::Error;

/// Errors raised by graph construction, matrix assembly and the eigensolvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative or non-finite weight {weight} on entry ({i}, {j})")]
    InvalidWeight { i: usize, j: usize, weight: f64 },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("node set must be nonempty")]
    EmptySubset,

    #[error("node sets overlap at node {node}")]
    OverlappingSets { node: usize },

    #[error("graph volume is zero")]
    ZeroVolume,

    #[error("node {node} is isolated (degree 0)")]
    IsolatedNode { node: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("dense view of a {n}x{n} matrix exceeds the cap of {cap}; use factored operations")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("leading eigenvalue is not simple (gap {gap:e})")]
    NotSimple { gap: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("{context}: {source}")]
    At {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI's JSON error records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidWeight { .. } => "invalid_weight",
            Error::EmptyGraph => "empty_graph",
            Error::NodeOutOfRange { .. } => "node_out_of_range",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptySubset => "empty_subset",
            Error::OverlappingSets { .. } => "overlapping_sets",
            Error::ZeroVolume => "zero_volume",
            Error::IsolatedNode { .. } => "isolated_node",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Disconnected => "disconnected",
            Error::DenseCapExceeded { .. } => "dense_cap_exceeded",
            Error::NoConvergence { .. } => "no_convergence",
            Error::NotSimple { .. } => "not_simple",
            Error::Consistency(_) => "consistency",
            Error::At { source, .. } => source.code(),
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn at(self, context: impl Into<String>) -> Error {
        Error::At {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
