use thiserror::Error;

/// Failure modes shared by every solver entry point.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("wrong topology: expected {expected}, found {found}")]
    WrongTopology { expected: &'static str, found: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

impl SolveError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SolveError::InvalidInput(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        SolveError::ResourceLimit(msg.into())
    }

    /// Short machine-readable tag, used in CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            SolveError::WrongTopology { .. } => "wrong_topology",
            SolveError::InvalidInput(_) => "invalid_input",
            SolveError::ResourceLimit(_) => "resource_limit",
        }
    }
}

pub type Result<T, E = SolveError> = std::result::Result<T, E>;
