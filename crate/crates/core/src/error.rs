use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("oracle limit exceeded: {what} = {value} exceeds cap {cap}")]
    OracleLimit {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("mask windows differ: expected {expected}, found {found}")]
    WindowMismatch { expected: usize, found: usize },

    #[error("numeric range error: {0}")]
    Range(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("no prime found in [{lo}, {hi}] after {attempts} attempts")]
    NoPrimeInRange { lo: u64, hi: u64, attempts: usize },

    #[error("gave up after {attempts} primes: only {accepted} of {wanted} reductions were usable ({reason})")]
    ResampleCapExhausted {
        attempts: usize,
        accepted: usize,
        wanted: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
