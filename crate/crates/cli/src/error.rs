use thiserror::Error;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validate(String),
    #[error("{0}")]
    Budget(String),
    /// A witness did not reproduce its recorded rates.
    #[error("{0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validate(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Verify(_) => 1,
        }
    }

    /// Stable prefix written before the message on standard error.
    pub fn prefix(&self) -> &'static str {
        match self {
            CliError::Validate(_) => "ERR_VALIDATE",
            CliError::Budget(_) => "ERR_BUDGET",
            CliError::Verify(_) => "ERR_VERIFY",
        }
    }

    pub fn validate(msg: impl Into<String>) -> Self {
        CliError::Validate(msg.into())
    }

    /// Prefixes a core error with the document field it came from.
    pub fn at(field: &str, err: qbroadcast::Error) -> Self {
        let msg = format!("{field}: {err}");
        if err.is_budget() {
            CliError::Budget(msg)
        } else {
            CliError::Validate(msg)
        }
    }
}

impl From<qbroadcast::Error> for CliError {
    fn from(err: qbroadcast::Error) -> Self {
        if err.is_budget() {
            CliError::Budget(err.to_string())
        } else {
            CliError::Validate(err.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Validate(format!("i/o: {err}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Validate(format!("malformed document: {err}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
