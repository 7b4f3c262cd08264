use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what} budget exceeded (limit {limit})")]
    Budget { what: &'static str, limit: u64 },

    #[error("index {index} out of range for rank {rank}")]
    RankMismatch { index: String, rank: String },

    #[error("level mismatch: expected {expected}, got {got}")]
    LevelMismatch { expected: u64, got: u64 },

    #[error("enumeration index not representable: {0}")]
    IndexNotRepresentable(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn budget(what: &'static str, limit: impl TryInto<u64>) -> Self {
        Error::Budget {
            what,
            limit: limit.try_into().unwrap_or(u64::MAX),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::IndexNotRepresentable(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
