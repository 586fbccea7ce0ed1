use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {field}: {reason}")]
    InvalidInstance { field: String, reason: String },

    #[error("cost of empty facility set undefined")]
    EmptyFacilitySet,

    #[error("facility index {0} out of range")]
    UnknownFacility(usize),

    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("instance too large for {what} ({size} > {limit})")]
    TooLarge { what: &'static str, size: usize, limit: usize },

    #[error("target unreachable: cost of all facilities {all} exceeds target {target}")]
    TargetUnreachable { all: String, target: String },

    #[error("threshold uncovered: no bid >= {0}")]
    ThresholdUncovered(String),

    #[error("instance is not metric (lambda* = {lambda})")]
    NotMetric { lambda: String },

    #[error("offline costs must be non-increasing in k; violated at k = {k}")]
    NonMonotoneOffline { k: usize },

    #[error("chain is not size-competitive: cost(F_{k}) exceeds opt_{k}")]
    NotSizeCompetitive { k: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInstance {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
