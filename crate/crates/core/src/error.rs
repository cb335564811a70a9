use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input does not have the shape of a distance matrix (non-square,
    /// asymmetric, label count mismatch, non-finite entries).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value violates a documented invariant (weights, metric axioms).
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("union graph is disconnected; label classes: {classes:?}")]
    Disconnected { classes: Vec<Vec<String>> },

    #[error("resource limit exceeded: {what} needs {requested}, limit is {limit}")]
    Budget {
        what: String,
        requested: usize,
        limit: usize,
    },

    #[error("precondition failed: missing {missing:?}")]
    Precondition { missing: Vec<String> },

    #[error("linear program failed: {0}")]
    Lp(String),

    /// An experiment config field is empty or out of range.
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("serialization: {0}")]
    Serialization(String),
}
