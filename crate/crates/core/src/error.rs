use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
}

/// Errors raised by model construction, evaluation and updates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("`{0}` is not defined on this kind of model")]
    Unsupported(String),
    #[error("the designated state does not survive the update")]
    PointEliminated,
    #[error("signatures differ: {0}")]
    SignatureMismatch(String),
    #[error("{0}")]
    Inconsistent(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed JSON: {0}")]
    Json(String),
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Json(e.to_string())
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
