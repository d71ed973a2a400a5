use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Picks the reference logit that the bookability filter measures every
/// candidate against.
pub trait AnchorStrategy: fmt::Debug + Send + Sync {
    /// Registry name.
    fn name(&self) -> &str;

    /// Anchor for a non-empty, non-increasing logit sequence. `total_ranked`
    /// is the number of listings that were ranked to produce the sequence.
    fn select(&self, sorted_logits: &[f64], total_ranked: usize) -> f64;
}

/// Validates the input and asks `strategy` for the anchor.
pub fn anchor_logit(
    sorted_logits: &[f64],
    strategy: &dyn AnchorStrategy,
    total_ranked: usize,
) -> Result<f64> {
    if sorted_logits.is_empty() {
        return Err(Error::Empty("no logits to anchor on"));
    }
    if sorted_logits.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidConfig(
            "anchor input must be sorted in non-increasing order".into(),
        ));
    }
    Ok(strategy.select(sorted_logits, total_ranked))
}

/// The highest logit.
#[derive(Debug, Clone, Copy, Default)]
pub struct Topmost;

impl AnchorStrategy for Topmost {
    fn name(&self) -> &str {
        "topmost"
    }

    fn select(&self, sorted_logits: &[f64], _total_ranked: usize) -> f64 {
        sorted_logits[0]
    }
}

/// Median of the top three logits, i.e. the second-highest. One outlier at
/// the top can no longer drag the threshold up. Shorter inputs use the
/// median of what exists.
#[derive(Debug, Clone, Copy, Default)]
pub struct MedianTop3;

impl AnchorStrategy for MedianTop3 {
    fn name(&self) -> &str {
        "median-top3"
    }

    fn select(&self, sorted_logits: &[f64], _total_ranked: usize) -> f64 {
        match sorted_logits {
            [only] => *only,
            [a, b] => 0.5 * (a + b),
            [_, second, ..] => *second,
            [] => unreachable!("anchor_logit rejects empty input"),
        }
    }
}

/// From `min_total` listings ranked onward, anchor on the listing at `rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankStep {
    pub min_total: usize,
    pub rank: usize,
}

/// Anchor rank grows with the number of listings ranked for the query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveRank {
    steps: Vec<RankStep>,
}

impl AdaptiveRank {
    pub fn new(steps: Vec<RankStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Empty("adaptive anchor step table"));
        }
        if steps.iter().any(|s| s.rank == 0) {
            return Err(Error::InvalidConfig("anchor ranks are 1-based".into()));
        }
        for pair in steps.windows(2) {
            if pair[1].min_total <= pair[0].min_total {
                return Err(Error::InvalidConfig(
                    "step thresholds must be strictly increasing".into(),
                ));
            }
            if pair[1].rank < pair[0].rank {
                return Err(Error::InvalidConfig(
                    "anchor ranks must be non-decreasing".into(),
                ));
            }
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[RankStep] {
        &self.steps
    }

    /// 1-based anchor rank for a result with `total_ranked` listings.
    pub fn rank_for(&self, total_ranked: usize) -> usize {
        self.steps
            .iter()
            .take_while(|s| s.min_total <= total_ranked)
            .last()
            .map_or(1, |s| s.rank)
    }
}

impl Default for AdaptiveRank {
    /// <=30 ranked: 1st, 31-100: 2nd, 101-300: 3rd, more: 4th.
    fn default() -> Self {
        Self {
            steps: vec![
                RankStep {
                    min_total: 0,
                    rank: 1,
                },
                RankStep {
                    min_total: 31,
                    rank: 2,
                },
                RankStep {
                    min_total: 101,
                    rank: 3,
                },
                RankStep {
                    min_total: 301,
                    rank: 4,
                },
            ],
        }
    }
}

impl AnchorStrategy for AdaptiveRank {
    fn name(&self) -> &str {
        "adaptive-rank"
    }

    fn select(&self, sorted_logits: &[f64], total_ranked: usize) -> f64 {
        let rank = self.rank_for(total_ranked).min(sorted_logits.len());
        sorted_logits[rank - 1]
    }
}

/// Anchor strategies by name.
#[derive(Debug, Clone)]
pub struct AnchorRegistry {
    strategies: BTreeMap<String, Arc<dyn AnchorStrategy>>,
}

impl AnchorRegistry {
    pub fn empty() -> Self {
        Self {
            strategies: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Arc::new(Topmost));
        registry.register(Arc::new(MedianTop3));
        registry.register(Arc::new(AdaptiveRank::default()));
        registry
    }

    /// Adds or replaces the strategy under its own name.
    pub fn register(&mut self, strategy: Arc<dyn AnchorStrategy>) {
        self.strategies
            .insert(strategy.name().to_string(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn AnchorStrategy>> {
        self.strategies
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Unknown {
                kind: "anchor strategy",
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.strategies.keys().map(String::as_str)
    }
}

impl Default for AnchorRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
