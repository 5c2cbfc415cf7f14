use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("origin is not an interior point of the body")]
    OriginNotInterior,
    #[error("affine map is singular (|det T| = {0:e})")]
    SingularMap(f64),
    #[error("body is degenerate: {0}")]
    DegenerateBody(String),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("p = -n is excluded (n = {0})")]
    PEqualsMinusN(usize),
    #[error("body is not centered at its centroid (|g| = {0:e})")]
    NotCentered(f64),
    #[error("support function is not strictly convex (min h + h'' = {0:e})")]
    NonConvex(f64),
    #[error("delta must lie in (0, 1/2), got {0}")]
    DeltaOutOfRange(f64),
    #[error("floating body is empty for delta = {0}")]
    EmptyFloatingBody(f64),
    #[error("delta sequence must contain at least 3 strictly decreasing values")]
    NonMonotoneSequence,
    #[error("covariance matrix is singular")]
    SingularCovariance,
    #[error("iteration did not converge: {0}")]
    NotConverged(String),
    #[error("body is not in isotropic position: {0}")]
    NotIsotropic(String),
    #[error("construction refused: {0}")]
    ConstructionRefused(String),
    #[error("p = {p} is outside the admissible range for {kind}")]
    POutOfRange { kind: String, p: f64 },
    #[error("p = {p} is not in a divergent range for {kind}")]
    NotDivergentRange { kind: String, p: f64 },
    #[error("ill-conditioned grid: {0}")]
    IllConditionedGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
