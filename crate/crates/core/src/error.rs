use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("symbol {symbol} at position {position} is outside alphabet of size {alphabet_size}")]
    SymbolOutOfRange {
        symbol: u32,
        position: usize,
        alphabet_size: u32,
    },

    #[error("invalid config value `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("not a stochastic matrix: {0}")]
    NotStochastic(String),

    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),

    #[error("no scored steps: burn-in {burn_in} leaves nothing of a length-{len} sequence")]
    NoScoredSteps { burn_in: usize, len: usize },

    #[error("loss reports do not describe the same sequence and burn-in")]
    MismatchedReports,

    #[error("prior is invalid: {0}")]
    InvalidPrior(String),

    #[error("coder {coder}: {reason}")]
    Coder { coder: &'static str, reason: String },

    #[error("malformed sequence file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
