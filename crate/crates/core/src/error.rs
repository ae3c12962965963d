use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("virtual polytope is not realizable (support fails at functional {witness:?})")]
    NotRealizable { witness: Vec<String> },

    #[error("not a face: {0}")]
    NotAFace(String),

    #[error("configurations are not analogous: {0}")]
    NotAnalogous(String),

    #[error("degree cap exceeded: degree {degree} > {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("symmetric difference of a pair is unbounded")]
    UnboundedDifference,

    /// A mathematical invariant failed. Always a bug, never bad input.
    #[error("internal defect: {0}")]
    Defect(String),
}

impl Error {
    /// Machine-readable tag used by the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotRealizable { .. } => "NotRealizable",
            Error::NotAFace(_) => "NotAFace",
            Error::NotAnalogous(_) => "NotAnalogous",
            Error::DegreeCap { .. } => "DegreeCap",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Precondition(_) => "Precondition",
            Error::UnboundedDifference => "UnboundedDifference",
            Error::Defect(_) => "Defect",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
