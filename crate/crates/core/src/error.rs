use std::path::PathBuf;
use std::time::Duration;

use crate::model::RefindabilityModel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed URI {input:?}: {reason}")]
    MalformedUri { input: String, reason: &'static str },

    /// The engine served a CAPTCHA or unusual-traffic interstitial.
    #[error("rate limited by search engine, retry in {}s", backoff.as_secs())]
    RateLimited { backoff: Duration },

    #[error("transport error: {0}")]
    Transport(String),

    #[error("fixture not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("{field} mismatch: store has {expected:?}, snapshot has {found:?}")]
    Mismatch {
        field: &'static str,
        expected: String,
        found: String,
    },

    #[error("collection store not found at {}", .0.display())]
    StoreMissing(PathBuf),

    #[error("collection store has no snapshots")]
    EmptyStore,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("rate undefined: {0} is empty")]
    UndefinedRate(&'static str),

    #[error("underdetermined fit: need at least {needed} points, got {got}")]
    Underdetermined { needed: usize, got: usize },

    #[error("fit did not converge after {iterations} iterations (best sse {:e})", best.sse)]
    NonConvergence {
        iterations: usize,
        best: RefindabilityModel,
    },

    #[error("oracle refuses {stories} stories x {days} days (limit {max_stories} x {max_days})")]
    OracleTooLarge {
        stories: usize,
        days: usize,
        max_stories: usize,
        max_days: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
