use thiserror::Error;

/// Coarse failure classes, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input: inconsistent dimensions, bad parameters, unknown names.
    Input,
    /// A numerical precondition failed (instability, singular matrices).
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model is unstable: companion spectral radius {radius:.6} (must be below 1)")]
    Unstable { radius: f64 },

    #[error("innovation covariance is not symmetric positive definite")]
    SigmaNotPositiveDefinite,

    #[error("A(w) is numerically singular at w = {omega:.6} rad (condition number {condition:.3e})")]
    SingularTransfer { omega: f64, condition: f64 },

    #[error("spectral block excluding channel {channel} is singular at w = {omega:.6} rad")]
    SingularBlock { channel: usize, omega: f64 },

    #[error("zero autospectrum for channel {channel} at w = {omega:.6} rad")]
    ZeroAutospectrum { channel: usize, omega: f64 },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Structural(_) | Error::Domain(_) | Error::UnknownFixture(_) => ErrorClass::Input,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
