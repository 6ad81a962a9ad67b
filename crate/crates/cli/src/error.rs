use thiserror::Error;

/// Failure categories with their process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Numerical(swingdamp::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

/// Validation failures from the core library are configuration errors;
/// everything else is numerical.
impl From<swingdamp::Error> for CliError {
    fn from(e: swingdamp::Error) -> Self {
        if e.is_validation() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e)
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
