use thiserror::Error;

/// Failures surfaced by the command-line tool, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input or flags; exit code 2.
    #[error("{0}")]
    Validation(String),
    /// The input was accepted but the computation failed; exit code 1.
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<segstat::Error> for CliError {
    fn from(e: segstat::Error) -> Self {
        use segstat::Error as E;
        match e {
            E::SingularCovariance
            | E::DegenerateStatistic
            | E::ZeroVariance(..)
            | E::ZeroMarginal
            | E::NotApplicable(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
