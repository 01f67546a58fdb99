use thiserror::Error;

/// Errors raised by the quaternionic operator toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("quaternion is zero within tolerance (|q| = {0:e})")]
    ZeroQuaternion(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors are right-linearly dependent (residual {residual:e} at vector {index})")]
    RankDeficient { index: usize, residual: f64 },

    #[error("complex matrix lacks symplectic block symmetry (deviation {0:e})")]
    NotSymplectic(f64),

    #[error("complex rank {0} of the adjoint representation is odd")]
    OddComplexRank(usize),

    #[error("matrix is singular (quaternionic rank {rank} < {required})")]
    Singular { rank: usize, required: usize },

    #[error("operator is not in class Y: {0}")]
    NotInClassY(String),

    #[error("operator is not in the required class: {0}")]
    NotInClass(String),

    #[error("operator is not isometric (residual {0:e})")]
    NotIsometric(f64),

    #[error("ran(I - U) is not dense: rank {rank} < {required}")]
    RangeNotDense { rank: usize, required: usize },

    #[error("shifted operator is numerically singular: {0}")]
    InternalSingular(String),

    #[error("lambda must have strictly positive imaginary components, got {0}")]
    InvalidLambda(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl QError {
    /// Stable variant name used in structured CLI error reports.
    pub fn name(&self) -> &'static str {
        match self {
            QError::ZeroQuaternion(_) => "ZeroQuaternion",
            QError::DimensionMismatch { .. } => "DimensionMismatch",
            QError::RankDeficient { .. } => "RankDeficient",
            QError::NotSymplectic(_) => "NotSymplectic",
            QError::OddComplexRank(_) => "OddComplexRank",
            QError::Singular { .. } => "Singular",
            QError::NotInClassY(_) => "NotInClassY",
            QError::NotInClass(_) => "NotInClass",
            QError::NotIsometric(_) => "NotIsometric",
            QError::RangeNotDense { .. } => "RangeNotDense",
            QError::InternalSingular(_) => "InternalSingular",
            QError::InvalidLambda(_) => "InvalidLambda",
            QError::InvalidBasis(_) => "InvalidBasis",
            QError::InvalidOperator(_) => "InvalidOperator",
            QError::InvalidArgument(_) => "InvalidArgument",
            QError::Malformed(_) => "Malformed",
            QError::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, QError>;
