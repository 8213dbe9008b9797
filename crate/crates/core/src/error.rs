use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square")]
    NotSquare,

    #[error("matrix is not skew-Hermitian (defect {defect:.3e})")]
    NotSkewHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("system needs at least 2 levels, got {0}")]
    TooFewLevels(usize),

    #[error("expected {expected} dipole moments, got {got}")]
    DipoleCount { expected: usize, got: usize },

    /// 1-based index of the vanishing moment.
    #[error("decomposable system: d_{index} = 0")]
    Decomposable { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generator index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("empty generator list")]
    NoGenerators,

    #[error("closure did not terminate within {0} passes")]
    PassLimit(usize),

    #[error("energy levels are not equally spaced (max gap deviation {deviation:.3e})")]
    NotEquispaced { deviation: f64 },

    #[error("theorem hypothesis does not hold: {0}")]
    HypothesisViolated(String),
}
