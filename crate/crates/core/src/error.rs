use thiserror::Error;

/// Failure modes shared by every module of the core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("indistinguishable Hamiltonians (distance {distance:e})")]
    Indistinguishable { distance: f64 },

    #[error("invalid layout: {0}")]
    InvalidLayout(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("malformed probability distribution (sum = {sum})")]
    MalformedDistribution { sum: f64 },

    #[error("energy {0} is outside the measurement model's domain")]
    OutsideDomain(f64),

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
