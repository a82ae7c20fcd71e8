use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid deck: {0}")]
    InvalidDeck(String),

    #[error("card type {card} outside 1..={num_types}")]
    CardOutOfRange { card: usize, num_types: usize },

    #[error("inconsistent history: {0}")]
    InconsistentHistory(String),

    #[error("invalid constraint state: {0}")]
    InvalidConstraint(String),

    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    LimitExceeded {
        what: &'static str,
        actual: String,
        limit: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("strategy {strategy} cannot be used here: {reason}")]
    UnsupportedStrategy { strategy: String, reason: String },

    #[error("observation does not match the {0} feedback model")]
    ObservationMismatch(&'static str),

    #[error("distribution not normalized (total mass {0})")]
    NotNormalized(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn limit_exceeded(
    what: &'static str,
    actual: impl ToString,
    limit: impl ToString,
) -> Error {
    Error::LimitExceeded {
        what,
        actual: actual.to_string(),
        limit: limit.to_string(),
    }
}
