use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
