use thiserror::Error;

use crate::mac::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<u32>, message: String },

    #[error("node {node}: {violation}")]
    Decision { node: usize, violation: Violation },

    #[error("weight file field `{field}`: {message}")]
    Weights { field: String, message: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn weights(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Weights {
            field: field.into(),
            message: message.into(),
        }
    }
}
