use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("h={h} and k={k} are not coprime (gcd {gcd})")]
    NotCoprime { h: i64, k: u64, gcd: u64 },

    #[error("coefficient table too short: need n <= {needed}, table has n_max = {available}")]
    TableTooShort { needed: u64, available: u64 },

    #[error("resource budget exceeded: {what} = {requested} exceeds limit {limit}")]
    Budget {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("infeasible parameter rule: {0}")]
    Infeasible(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed coefficient cache at line {line}: {reason}")]
    Cache { line: usize, reason: String },

    #[error("coefficient table rejected: {0}")]
    Rejected(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
