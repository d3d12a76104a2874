use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input that cannot be decoded at all (bad rational, bad exponent key).
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("degree {0} is too small, curves must have degree at least 3")]
    DegreeTooSmall(i64),
    #[error("the linear forms are linearly dependent")]
    DependentLinearForms,
    #[error("the point does not lie on the curve")]
    PointNotOnCurve,
    #[error("all coordinates of a projective point are zero")]
    ZeroPoint,
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("the matrix does not define a singular sheaf")]
    NotInSingularLocus,
    #[error("the matrix is not in standard form (z1 = x1, z2 = x2)")]
    NotNormalized,
    #[error("the tangent vector is tangent to the singular locus, not normal")]
    TangentVectorNotNormal,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("precondition violated: {0}")]
    Domain(String),
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
