//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A linear-algebra routine could not produce a usable result.
    #[error("numerical failure: {message}{}", jitter_suffix(.jitter))]
    Numerical {
        message: String,
        /// Final jitter level reached before giving up, when applicable.
        jitter: Option<f64>,
    },

    /// Malformed tabular data, with 1-based row/column context.
    #[error("{path}: row {row}, column {col}: {message}")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn jitter_suffix(jitter: &Option<f64>) -> String {
    match jitter {
        Some(j) => format!(" (final jitter {j:.3e})"),
        None => String::new(),
    }
}

impl Error {
    pub fn invalid_input(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical {
            message: message.into(),
            jitter: None,
        }
    }

    pub fn numerical_with_jitter(message: impl Into<String>, jitter: f64) -> Self {
        Error::Numerical {
            message: message.into(),
            jitter: Some(jitter),
        }
    }

    /// Process exit code used by the command-line driver: 2 for bad input or
    /// configuration, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
