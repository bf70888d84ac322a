use thiserror::Error;

/// Errors produced by the encoders, decoders and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested allocation exceeds the configured budget.
    #[error("resource refusal: {what} needs {requested} entries, budget is {budget}")]
    ResourceRefusal {
        what: String,
        requested: u128,
        budget: u128,
    },

    /// Every partial path died before `slot`; nothing is left to prune towards.
    #[error("decode aborted at slot {slot}: no admissible parity patterns")]
    DecodeAbort { slot: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
