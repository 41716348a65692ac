use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("probability out of range: {0}")]
    OutOfRange(f64),

    #[error("relation has no statements")]
    EmptyRelation,

    #[error("invalid gold standard: {0}")]
    Gold(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input (as opposed to IO failures).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
