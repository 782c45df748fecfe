use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (must be < {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("indices must be distinct, got {0} twice")]
    EqualIndices(usize),

    #[error("operands live in different algebras: {left} vs {right}")]
    ContextMismatch { left: String, right: String },

    #[error("expected an element of {expected}, found {found}")]
    WrongContext { expected: String, found: String },

    #[error("twist matrix is not antisymmetric rational/float data: {0}")]
    InvalidTheta(String),

    #[error("operation is only defined for the untwisted algebra (theta = 0)")]
    NonzeroTwist,

    #[error("tuple is not compatible: pi^{i}_{j}(b_{i}) != pi^{j}_{i}(b_{j})")]
    IncompatibleTuple { i: usize, j: usize },

    #[error("candidate support of size {size} exceeds the configured bound {bound}")]
    SupportOverflow { size: usize, bound: usize },

    #[error("linear system has no solution (residual {residual:e})")]
    Unsolvable { residual: f64 },

    #[error("element is not invariant under the gauge action on slot {slot}")]
    NotInvariant { slot: usize },

    #[error("class invariant is not stable across truncations: {values:?}")]
    UnstableInvariant { values: Vec<f64> },

    #[error("numeric envelope exceeded: operator dimension {dim} > {max}")]
    Envelope { dim: usize, max: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
