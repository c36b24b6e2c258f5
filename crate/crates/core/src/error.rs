use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants are grouped so that a command-line front end can map them
/// onto distinct exit codes: syntax problems, violated preconditions and
/// questions that fall outside the decidable regimes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("descriptor mismatch: {0}")]
    Mismatch(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("undecidable here: {0}")]
    Undecidable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for errors caused by malformed input text.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
