use thiserror::Error;

/// Errors raised by state validation and the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    NotUnitTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("vector norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("matrix is not an isometry (max |W^dagger W - I| = {0:e})")]
    NotIsometry(f64),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension cap exceeded: {0}")]
    DimensionCapExceeded(String),

    #[error("state is not pure (entropy {0:e})")]
    NotPure(f64),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl Error {
    /// Attaches the name of the offending input field.
    pub fn in_field(self, field: &str) -> Self {
        match self {
            Self::Field { .. } => self,
            other => Self::Field { field: field.to_string(), message: other.to_string() },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
