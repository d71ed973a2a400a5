use std::fmt;
use std::sync::Arc;

use super::anchor::{anchor_logit, AnchorStrategy, Topmost};
use crate::display::{DisplayItem, DisplaySet, PinTier};
use crate::error::{Error, Result};
use crate::listing::{rank_by_logit, Listing, RankedResult};

/// Pins shown before any filtering existed.
pub const DEFAULT_MAX_PINS: usize = 18;

#[derive(Clone)]
pub struct FilterConfig {
    alpha: f64,
    anchor: Arc<dyn AnchorStrategy>,
    max_pins: usize,
}

impl fmt::Debug for FilterConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterConfig")
            .field("alpha", &self.alpha)
            .field("anchor", &self.anchor.name())
            .field("max_pins", &self.max_pins)
            .finish()
    }
}

impl FilterConfig {
    /// `alpha = f64::INFINITY` turns filtering off.
    pub fn new(alpha: f64, anchor: Arc<dyn AnchorStrategy>, max_pins: usize) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        if max_pins == 0 {
            return Err(Error::InvalidConfig("max_pins must be >= 1".into()));
        }
        Ok(Self {
            alpha,
            anchor,
            max_pins,
        })
    }

    pub fn topmost(alpha: f64) -> Result<Self> {
        Self::new(alpha, Arc::new(Topmost), DEFAULT_MAX_PINS)
    }

    pub fn unfiltered(max_pins: usize) -> Result<Self> {
        Self::new(f64::INFINITY, Arc::new(Topmost), max_pins)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn anchor(&self) -> &dyn AnchorStrategy {
        self.anchor.as_ref()
    }

    pub fn max_pins(&self) -> usize {
        self.max_pins
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.anchor.clone(), self.max_pins)
    }
}

/// The admission test: `anchor - logit < alpha`, i.e. the listing's booking
/// probability exceeds the anchor's divided by `e^alpha`.
pub fn admits(anchor: f64, logit: f64, alpha: f64) -> bool {
    anchor - logit < alpha
}

/// Filters an already-ranked result: keep the top `max_pins`, then keep
/// those within `alpha` logits of the anchor. Order is preserved.
pub fn filter_ranked(
    ranked: &RankedResult,
    cfg: &FilterConfig,
    total_ranked: usize,
) -> Result<RankedResult> {
    let top = ranked.top(cfg.max_pins);
    let anchor = anchor_logit(&top.logits(), cfg.anchor(), total_ranked)?;
    let kept: Vec<Listing> = top
        .into_listings()
        .into_iter()
        .filter(|l| admits(anchor, l.logit, cfg.alpha))
        .collect();
    // Admitted listings are a prefix of a ranked result, so re-ranking keeps order.
    rank_by_logit(&kept)
}

/// Map pins for a query: ranks `listings`, caps at `max_pins` and applies
/// the bookability filter. Never empty; the top listing always passes.
pub fn bookability_filter(
    listings: &[Listing],
    cfg: &FilterConfig,
    total_ranked: usize,
) -> Result<DisplaySet> {
    let ranked = rank_by_logit(listings)?;
    let kept = filter_ranked(&ranked, cfg, total_ranked)?;
    DisplaySet::from_ranked_pins(&kept)
}

/// Every listed result gets a pin: those passing the filter test are regular
/// pins, the rest are mini pins. List ranks follow the ranked order.
pub fn assign_tiers(list_result: &RankedResult, cfg: &FilterConfig) -> Result<DisplaySet> {
    if list_result.len() > cfg.max_pins {
        return Err(Error::InvalidConfig(format!(
            "list of {} results exceeds max_pins {}",
            list_result.len(),
            cfg.max_pins
        )));
    }
    let anchor = anchor_logit(&list_result.logits(), cfg.anchor(), list_result.len())?;
    let items = list_result
        .listings()
        .iter()
        .enumerate()
        .map(|(i, l)| DisplayItem {
            listing: l.clone(),
            list_rank: Some(i + 1),
            tier: if admits(anchor, l.logit, cfg.alpha) {
                PinTier::Regular
            } else {
                PinTier::Mini
            },
        })
        .collect();
    DisplaySet::new(items, None)
}
