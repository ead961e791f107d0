use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("zero matrix has no projective class")]
    ZeroMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is numerically singular")]
    NotInvertible,
    #[error("matrix is numerically of full rank")]
    NoNullVector,
    #[error("operation is only defined over the real field")]
    Unsupported,
    #[error("projective points are orthogonal, tangent distance is infinite")]
    Infinite,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("eigentriple is ill-posed")]
    IllPosed,
    #[error("direction is not orthogonal to the matrix")]
    NotOrthogonal,
    #[error("triple is not normalized")]
    NotNormalized,
    #[error("residual {residual:.3e} exceeds the eigentriple tolerance")]
    NotOnVariety { residual: f64 },
    #[error("path leaves the well-posed locus near t = {t}")]
    PathLeavesW { t: f64 },
    #[error("Newton step {step} is not defined")]
    StepNotDefined { step: usize },
    #[error("invalid input: {0}")]
    Input(String),
}
