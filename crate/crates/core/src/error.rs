use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A logit above zero cannot be the log of a probability.
    #[error("logit {0} is positive; logits must be natural-log booking probabilities (<= 0)")]
    PositiveLogit(f64),

    #[error("value {value} for `{field}` is not finite")]
    NonFinite { field: &'static str, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("duplicate listing id `{0}`")]
    DuplicateId(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("attention weight unresolvable for listing `{id}`: {reason}")]
    UnresolvableAttention { id: String, reason: &'static str },

    #[error("no relevance given for listing `{0}`")]
    MissingRelevance(String),

    #[error("center cell has {impressions} impressions and {clicks} clicks; need >= {required} impressions and at least one click")]
    UncoveredCenter {
        impressions: u64,
        clicks: u64,
        required: u64,
    },

    #[error("no impressions at rank 1; cannot normalize the curve")]
    MissingRankOne,

    #[error("unknown {kind} `{name}`; known: {known}")]
    Unknown {
        kind: &'static str,
        name: String,
        known: String,
    },
}

pub(crate) fn ensure_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { field, value })
    }
}
