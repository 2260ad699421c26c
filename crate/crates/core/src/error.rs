use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed user input: unknown letter, bad bound, empty loop.
    #[error("input error: {0}")]
    Input(String),

    /// An operation was called on an automaton outside its domain.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A textual artifact (LTL, HOA, lasso word) failed to parse.
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A search or solver exceeded its configured budget.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The external solver could not be run or produced unusable output.
    #[error("external solver failure: {0}")]
    Solver(String),

    /// A solver model could not be turned back into an automaton.
    #[error("decode error: {0}")]
    Decode(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
