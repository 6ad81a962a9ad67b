use thiserror::Error;

/// Errors raised by the dynamics, control, synthesis and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("model fails PBH test: {0}")]
    Uncontrollable(String),

    #[error("synthesis failed: {0}")]
    SynthesisFailed(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("simulation aborted at t = {time:.4} s: {source}")]
    SimulationAborted { time: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for input-validation failures (as opposed to numerical ones).
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
