use thiserror::Error;

use crate::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid io-program: {0}")]
    InvalidIoProgram(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{what} has {size} atoms, which exceeds the enumeration limit of {limit}{hint}")]
    LimitExceeded {
        what: String,
        size: usize,
        limit: usize,
        hint: String,
    },
    #[error("formula contains the placeholder `{0}`; apply a valuation first")]
    Placeholder(String),
    #[error("not a completable set: {0}")]
    NotCompletable(String),
    #[error("ill-formed formula: {0}")]
    IllFormed(String),
    #[error("io-programs are not comparable: {0}")]
    NotComparable(String),
}

impl Error {
    pub(crate) fn limit(what: impl Into<String>, size: usize, limit: usize) -> Self {
        Error::LimitExceeded {
            what: what.into(),
            size,
            limit,
            hint: String::new(),
        }
    }
}
