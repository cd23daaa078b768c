use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("arena too dense: could not place {n} robots in a {side} x {side} arena")]
    ArenaTooDense { n: usize, side: f64 },

    #[error("configuration check failed: {0}")]
    InvalidConfiguration(String),

    #[error("singular geometry: {0}")]
    Singular(&'static str),

    #[error("robots aggregate within this revolution (negative radicand {0})")]
    AggregatesWithinRevolution(f64),

    #[error("target is never visible: {0}")]
    NeverVisible(String),

    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
