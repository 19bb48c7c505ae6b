use thiserror::Error;

/// Top-level failure of a subcommand, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or configuration. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable, unparsable, or inconsistent data. Exit code 2.
    #[error("{0}")]
    Data(String),
    /// The sampler ran but the result fails the convergence gates. Exit
    /// code 3.
    #[error("convergence failure: {0}")]
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Convergence(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Attaches a file or subject to an underlying error message.
pub fn data_err(context: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{context}: {e}"))
}
