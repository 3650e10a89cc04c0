use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty candidate set")]
    EmptyCandidates,

    #[error("action {action} out of range for an action set of size {size}")]
    ActionOutOfRange { action: usize, size: usize },

    #[error("team action {0:?} does not match the action space")]
    BadTeamAction(Vec<usize>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reward {0} outside [0, 1] for a Bernoulli-family strategy")]
    RewardOutOfRange(f64),

    #[error("budget exhausted")]
    BudgetExhausted,

    #[error("malformed rank: {0}")]
    MalformedRank(String),

    #[error("observability knowledge must be homogeneous")]
    MixedObservability,

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("incompatible configuration: {0}")]
    Incompatible(String),

    #[error("curve lengths differ: {expected} vs {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("unknown figure `{0}`")]
    UnknownFigure(String),

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("unknown session `{0}`")]
    UnknownSession(String),

    #[error("stale sequence number: expected {expected}, got {got}")]
    StaleSequence { expected: u64, got: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
