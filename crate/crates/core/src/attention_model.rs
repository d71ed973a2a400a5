//! Models of how a user's attention is spread over displayed results.
//!
//! Each model yields a raw, un-normalized relative attention per displayed
//! item. The booking evaluator and the simulator both normalize those
//! weights into a single-examination distribution.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::display::{DisplayItem, DisplaySet, PinTier};
use crate::error::{Error, Result};
use crate::surface::AttentionSurface;

/// Attention by list position: strictly positive, non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionalWeights(Vec<f64>);

impl PositionalWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("positional weights"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidConfig(
                "positional weights must be finite and > 0".into(),
            ));
        }
        if weights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidConfig(
                "positional weights must be non-increasing".into(),
            ));
        }
        Ok(Self(weights))
    }

    /// `w(i) = 1 / i` for ranks `1..=n`.
    pub fn harmonic(n: usize) -> Self {
        Self((1..=n.max(1)).map(|i| 1.0 / i as f64).collect())
    }

    /// Weight at a 1-based rank.
    pub fn at(&self, rank: usize) -> Option<f64> {
        rank.checked_sub(1).and_then(|i| self.0.get(i)).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierWeights {
    pub regular: f64,
    pub mini: f64,
    pub hidden: f64,
}

impl Default for TierWeights {
    fn default() -> Self {
        Self {
            regular: 1.0,
            mini: 1.0 / 8.0,
            hidden: 0.0,
        }
    }
}

impl TierWeights {
    pub fn validate(&self) -> Result<()> {
        for w in [self.regular, self.mini, self.hidden] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "tier weight {w} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }

    pub fn of(&self, tier: PinTier) -> f64 {
        match tier {
            PinTier::Regular => self.regular,
            PinTier::Mini => self.mini,
            PinTier::None => self.hidden,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttentionModel {
    /// Attention decays down a list.
    ListPositional(PositionalWeights),
    /// Every pin receives the same attention regardless of rank.
    MapUniform,
    /// Attention depends on the pin tier only.
    MapTiered(TierWeights),
    /// Attention from a click-through surface around the map center.
    /// A display that carries its own center overrides `center`.
    MapContinuous {
        surface: Arc<AttentionSurface>,
        center: (f64, f64),
    },
}

/// Raw relative attention per displayed item, in display order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWeights {
    pub weights: Vec<f64>,
    /// Pins that fell outside the surface and were given zero attention.
    pub out_of_support: usize,
}

impl RawWeights {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weights scaled to sum to 1; all zeros when nothing is attended.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.total();
        if total > 0.0 {
            self.weights.iter().map(|w| w / total).collect()
        } else {
            vec![0.0; self.weights.len()]
        }
    }
}

impl AttentionModel {
    pub fn harmonic_list(n: usize) -> Self {
        AttentionModel::ListPositional(PositionalWeights::harmonic(n))
    }

    pub fn tiered() -> Self {
        AttentionModel::MapTiered(TierWeights::default())
    }

    pub fn continuous(surface: Arc<AttentionSurface>) -> Self {
        AttentionModel::MapContinuous {
            surface,
            center: (0.0, 0.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttentionModel::ListPositional(_) => "list_positional",
            AttentionModel::MapUniform => "map_uniform",
            AttentionModel::MapTiered(_) => "map_tiered",
            AttentionModel::MapContinuous { .. } => "map_continuous",
        }
    }

    pub fn is_map(&self) -> bool {
        !matches!(self, AttentionModel::ListPositional(_))
    }

    pub fn raw_weights(&self, display: &DisplaySet) -> Result<RawWeights> {
        let mut out_of_support = 0;
        let weights = display
            .items()
            .iter()
            .map(|item| self.item_weight(item, display.center(), &mut out_of_support))
            .collect::<Result<Vec<_>>>()?;
        Ok(RawWeights {
            weights,
            out_of_support,
        })
    }

    fn item_weight(
        &self,
        item: &DisplayItem,
        display_center: Option<(f64, f64)>,
        missed: &mut usize,
    ) -> Result<f64> {
        match self {
            AttentionModel::ListPositional(weights) => {
                let rank = item.list_rank.ok_or_else(|| Error::UnresolvableAttention {
                    id: item.listing.id.clone(),
                    reason: "item has no list rank",
                })?;
                weights
                    .at(rank)
                    .ok_or_else(|| Error::UnresolvableAttention {
                        id: item.listing.id.clone(),
                        reason: "list rank beyond the positional weights",
                    })
            }
            AttentionModel::MapUniform => Ok(if item.tier.is_pin() { 1.0 } else { 0.0 }),
            AttentionModel::MapTiered(tiers) => Ok(tiers.of(item.tier)),
            AttentionModel::MapContinuous { surface, center } => {
                if !item.tier.is_pin() {
                    return Ok(0.0);
                }
                let (x0, y0) = display_center.unwrap_or(*center);
                match surface.ctr_at(item.listing.x - x0, item.listing.y - y0) {
                    Some(ctr) => Ok(ctr / surface.center_ctr()),
                    None => {
                        *missed += 1;
                        Ok(0.0)
                    }
                }
            }
        }
    }
}
