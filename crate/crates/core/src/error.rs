use thiserror::Error;

/// A syntax or semantic error in textual input.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// Errors raised by the solver.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("input: {0}")]
    Input(String),
    #[error("precision limit of {limit} bits exceeded at level {level} (oracle {oracle})")]
    PrecisionLimit {
        limit: u64,
        level: usize,
        oracle: String,
    },
    #[error("system is not regular: {0}")]
    NotRegular(String),
}
