//! Pin selection: the bookability filter, its anchor strategies, and the
//! regular/mini tier split used when every listed result must be pinned.

mod anchor;
mod filter;

pub use anchor::{
    anchor_logit, AdaptiveRank, AnchorRegistry, AnchorStrategy, MedianTop3, RankStep, Topmost,
};
pub use filter::{
    admits, assign_tiers, bookability_filter, filter_ranked, FilterConfig, DEFAULT_MAX_PINS,
};
