use infoflow_core::{Error as CoreError, ErrorClass};
use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Exit status for malformed input, files or flags.
pub const EXIT_INPUT: u8 = 2;
/// Exit status for numerical failures (instability, singular matrices).
pub const EXIT_NUMERICAL: u8 = 3;
/// Exit status when `verify` finds a deviation above its bound.
pub const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    /// Malformed CSV or JSON. `location` is `line:column` when known.
    #[error("{origin}:{location}: {message}")]
    Parse { origin: String, location: String, message: String },

    /// Well-formed input carrying unusable values (NaN, inf).
    #[error("{origin}:{location}: {message}")]
    Data { origin: String, location: String, message: String },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{} check(s) exceeded their bound: {}", .failed.len(), .failed.join(", "))]
    Verification { failed: Vec<String> },
}

impl CliError {
    pub fn io(path: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_string(), message: err.to_string() }
    }

    /// Stable snake_case identifier printed in front of every error message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Data { .. } => "data",
            CliError::Config(_) => "config",
            CliError::Verification { .. } => "verification_failed",
            CliError::Core(e) => match e {
                CoreError::Structural(_) => "structural",
                CoreError::Domain(_) => "domain",
                CoreError::UnknownFixture(_) => "unknown_fixture",
                CoreError::Unstable { .. } => "unstable",
                CoreError::SigmaNotPositiveDefinite => "sigma_not_positive_definite",
                CoreError::SingularTransfer { .. } => "singular_transfer",
                CoreError::SingularBlock { .. } => "singular_block",
                CoreError::ZeroAutospectrum { .. } => "zero_autospectrum",
                CoreError::Estimation(_) => "estimation",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification { .. } => EXIT_VERIFICATION,
            CliError::Core(e) if e.class() == ErrorClass::Numerical => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }

    /// `error: <code>: <message>` on a single line.
    pub fn render(&self) -> String {
        let message: String = self.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
        format!("error: {}: {}", self.code(), message)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
