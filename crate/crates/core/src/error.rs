use thiserror::Error;

/// Errors raised by the library. Variant names double as the `error_kind`
/// tag the CLI reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e}, largest {max_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, max_eigenvalue: f64 },
    #[error("matrix orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("matrix is not symmetric: correction {0:e} exceeds 1e-8")]
    NotSymmetric(f64),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("symplectic relations violated: residual {0:e}")]
    NotSymplectic(f64),
    #[error("CZ + D is numerically singular")]
    SingularDenominator,
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("reduction did not terminate within {0} iterations")]
    IterationLimitExceeded(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point is not in standard position: coupling {0:e} exceeds tolerance")]
    NotStandardPosition(f64),
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("Riemann relations violated: {0}")]
    RiemannRelationViolation(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("query point {x} is within 1e-6 of a branch point")]
    QueryTooCloseToBranchPoint { x: f64 },
    #[error("invalid degeneration family: {0}")]
    InvalidFamily(String),
    #[error("degeneration trend is inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::OrderMismatch(..) => "OrderMismatch",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::MalformedMatrix(_) => "MalformedMatrix",
            Error::NotSymplectic(_) => "NotSymplectic",
            Error::SingularDenominator => "SingularDenominator",
            Error::GenusMismatch(..) => "GenusMismatch",
            Error::IterationLimitExceeded(_) => "IterationLimitExceeded",
            Error::Unsupported(_) => "Unsupported",
            Error::NotStandardPosition(_) => "NotStandardPosition",
            Error::InvalidIndexSet(_) => "InvalidIndexSet",
            Error::InvalidCurve(_) => "InvalidCurve",
            Error::RiemannRelationViolation(_) => "RiemannRelationViolation",
            Error::QuadratureNonConvergence(_) => "QuadratureNonConvergence",
            Error::QueryTooCloseToBranchPoint { .. } => "QueryTooCloseToBranchPoint",
            Error::InvalidFamily(_) => "InvalidFamily",
            Error::Inconclusive(_) => "Inconclusive",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Internal(_) => "Internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
