use thiserror::Error;

/// Errors surfaced by lattice construction, operators and the batch driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("domain is not connected: {0}")]
    Disconnected(String),

    #[error("query outside the domain: {0}")]
    OutsideDomain(String),

    #[error("empty stencil: {0}")]
    EmptyStencil(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("nothing to report")]
    NothingToReport,

    #[error("invalid config at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
