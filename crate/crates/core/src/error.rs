//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A physical quantity left its valid domain (e.g. non-positive distance).
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller violated an interface contract (e.g. non-unit beam direction).
    #[error("contract violation: {0}")]
    Contract(String),

    /// `step` was called on an episode that already finished.
    #[error("episode is done; call reset before stepping again")]
    EpisodeDone,

    /// A learned-policy checkpoint could not be found.
    #[error("checkpoint not found: {0}")]
    MissingCheckpoint(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
