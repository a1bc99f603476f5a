use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The enclosure of a real power still contains an integer at the
    /// largest precision the policy allows.
    #[error("cannot decide {what} at {bits} bits of precision")]
    AmbiguousAtMaxPrecision { what: String, bits: usize },

    #[error("invalid exponent `{0}`")]
    InvalidExponent(String),

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i64, m: u64 },

    #[error("the divisor function is undefined at 0")]
    DivisorOfZero,

    #[error("exponential sum has {terms} terms (limit {limit})")]
    RangeTooLarge { terms: u64, limit: u64 },

    #[error("need at least 3 samples with |error| >= 1, got {usable}")]
    InsufficientData { usable: usize },

    #[error("{0} does not fit in 64 bits")]
    Overflow(String),

    #[error("{count} scan rows failed; first: {first}")]
    ScanRowsFailed { count: usize, first: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
