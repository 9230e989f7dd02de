use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse group spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("bound of kind {found} cannot be used here (expected {expected})")]
    Kind { found: String, expected: String },

    #[error("missing bound for s((Z_{p})^{rank})")]
    MissingBound { p: u64, rank: usize },

    #[error("group of order {order} is too large for exhaustive methods (limit {limit})")]
    GroupTooLarge { order: String, limit: usize },

    #[error("malformed sequence: {0}")]
    Sequence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
