use thiserror::Error;

/// Error type shared by every subsystem.
#[derive(Debug, Error)]
pub enum PathlabError {
    /// A configuration or input violated a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A computation would exceed a configured enumeration budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// An accumulated quantity took a value that is impossible in exact
    /// arithmetic (for example a negative squared magnitude).
    #[error("numerical integrity error: {0}")]
    NumericalIntegrity(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Config(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PathlabError>;

impl PathlabError {
    pub fn validation(msg: impl Into<String>) -> Self {
        PathlabError::Validation(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        PathlabError::Budget(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        PathlabError::NumericalIntegrity(msg.into())
    }
}
