use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is singular")]
    Singular,
    #[error("lattice is not even")]
    NotEven,
    #[error("not a sublattice: {0}")]
    NotSublattice(String),
    #[error("invalid glue data: {0}")]
    BadGlue(String),
    #[error("not an isometry: {0}")]
    NotIsometry(String),
    #[error("map does not preserve the quadratic form: {0}")]
    NotOrthogonal(String),
    #[error("unknown class tag {0:?}")]
    UnknownClass(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed input: {0}")]
    Parse(String),
}
