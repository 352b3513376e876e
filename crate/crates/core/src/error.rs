use std::path::PathBuf;

use thiserror::Error;

use crate::model::UserId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("snapshot schema violation: {0}")]
    Schema(String),

    #[error("snapshot integrity violation: {0}")]
    Integrity(String),

    #[error("friendship between {0} and {1} is not symmetric")]
    AsymmetricFriendship(UserId, UserId),

    #[error("unknown user id `{0}`")]
    UnknownUser(UserId),

    #[error("query requires two distinct users, got `{0}` twice")]
    SameUser(UserId),

    #[error("oracle query budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("invalid generator parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("edge list line {line}: {reason}")]
    EdgeListLine { line: usize, reason: String },

    #[error("contradictory attribute rows for user `{id}` feature `{feature}`: `{first}` vs `{second}`")]
    ContradictoryAttribute {
        id: String,
        feature: String,
        first: String,
        second: String,
    },

    #[error("no friends recovered for `{0}`; attribute inference impossible")]
    NoRecoveredFriends(UserId),

    #[error("mutual friend map was built for `{found}`, not `{expected}`")]
    VictimMismatch { expected: UserId, found: UserId },

    #[error("user `{0}` is not a 2-hop node of the graph")]
    NotInGraph(UserId),

    #[error("calibration data contains no ground-truth friends")]
    NoPositives,

    #[error("victim set is empty")]
    EmptyVictimSet,

    #[error("candidate `{0}` has no ground-truth flag")]
    MissingTruth(UserId),

    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
