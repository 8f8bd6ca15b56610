use thiserror::Error;

/// Errors raised by the library outside of contract execution.
///
/// Contract failures are not errors: they are recorded on the ledger as
/// [`Revert`](crate::ledger::Revert) results.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("corrupt payload: {0}")]
    CorruptPayload(String),

    #[error("malformed RID: {0}")]
    MalformedRid(String),

    #[error("invalid DMS coordinate: {0}")]
    InvalidDms(String),

    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),

    #[error("chain broken at block {index}: {reason}")]
    ChainBroken { index: u64, reason: String },

    #[error("unknown account {0}")]
    UnknownAccount(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
