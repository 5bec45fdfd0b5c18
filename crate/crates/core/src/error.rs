use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter record violates its invariants.
    #[error("invalid specification field `{field}`: {message}")]
    Spec { field: String, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Solver failure; `seed` names the sample that triggered it, when known.
    #[error("numerical failure: {message}{}", seed.as_ref().map(|s| format!(" (seed {s})")).unwrap_or_default())]
    Numerical {
        message: String,
        seed: Option<String>,
    },

    #[error("graph has no non-edges")]
    NoNonEdges,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn spec(field: &str, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical {
            message: message.into(),
            seed: None,
        }
    }

    /// Attaches a seed description to numerical errors; other variants pass through.
    pub fn with_seed(self, seed: impl std::fmt::Display) -> Self {
        match self {
            Error::Numerical { message, .. } => Error::Numerical {
                message,
                seed: Some(seed.to_string()),
            },
            other => other,
        }
    }
}
