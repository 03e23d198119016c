use thiserror::Error;

/// Errors raised by the point-interaction library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("constraint alpha*gamma - beta*delta = 1 violated (residual {residual:e})")]
    ConstraintViolation { residual: f64 },

    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),

    #[error("invalid phase-diagram slice: {0}")]
    InvalidSlice(String),

    #[error("scattering denominator vanishes at k = {k}")]
    SingularDenominator { k: f64 },

    #[error("matching system is singular at k = {k}")]
    SingularSystem { k: f64 },

    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),

    #[error("particles {i} and {j} coincide; configuration undefined")]
    OnBoundary { i: usize, j: usize },

    #[error("incidence angle {0} outside the open interval (0, pi/3)")]
    GrazingAngle(f64),

    #[error("coupling g0 = {0} does not bind (need g0 < 0)")]
    NonBinding(f64),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
