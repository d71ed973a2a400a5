//! What a user is shown: listings with a list rank, a pin tier, or both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::listing::{Listing, RankedResult};

/// How a listing is drawn on the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PinTier {
    /// Oval pin with the price on it.
    Regular,
    /// Small pin without a price.
    Mini,
    /// Not on the map at all.
    None,
}

impl PinTier {
    pub fn is_pin(self) -> bool {
        !matches!(self, PinTier::None)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PinTier::Regular => "regular",
            PinTier::Mini => "mini",
            PinTier::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplayItem {
    pub listing: Listing,
    /// 1-based position in the list, if the listing is shown as a card.
    pub list_rank: Option<usize>,
    pub tier: PinTier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplaySet {
    items: Vec<DisplayItem>,
    center: Option<(f64, f64)>,
}

impl DisplaySet {
    pub fn new(items: Vec<DisplayItem>, center: Option<(f64, f64)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Empty("display set has no items"));
        }
        for item in &items {
            if item.list_rank == Some(0) {
                return Err(Error::InvalidConfig(format!(
                    "listing `{}` has list rank 0; ranks are 1-based",
                    item.listing.id
                )));
            }
        }
        Ok(Self { items, center })
    }

    /// A list of cards in the given order, ranks `1..=n`, no pins.
    pub fn list(listings: Vec<Listing>) -> Result<Self> {
        Self::new(
            listings
                .into_iter()
                .enumerate()
                .map(|(i, listing)| DisplayItem {
                    listing,
                    list_rank: Some(i + 1),
                    tier: PinTier::None,
                })
                .collect(),
            None,
        )
    }

    /// Regular pins only; the order is kept as the list rank for reference.
    pub fn pins(listings: Vec<Listing>) -> Result<Self> {
        Self::new(
            listings
                .into_iter()
                .enumerate()
                .map(|(i, listing)| DisplayItem {
                    listing,
                    list_rank: Some(i + 1),
                    tier: PinTier::Regular,
                })
                .collect(),
            None,
        )
    }

    pub fn from_ranked_pins(ranked: &RankedResult) -> Result<Self> {
        Self::pins(ranked.listings().to_vec())
    }

    pub fn with_center(mut self, center: (f64, f64)) -> Self {
        self.center = Some(center);
        self
    }

    pub fn items(&self) -> &[DisplayItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn center(&self) -> Option<(f64, f64)> {
        self.center
    }

    pub fn listings(&self) -> impl Iterator<Item = &Listing> {
        self.items.iter().map(|item| &item.listing)
    }

    pub fn count_tier(&self, tier: PinTier) -> usize {
        self.items.iter().filter(|item| item.tier == tier).count()
    }

    pub fn mean_probability(&self) -> f64 {
        self.listings()
            .map(Listing::booking_probability)
            .sum::<f64>()
            / self.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_display_is_rejected() {
        assert!(DisplaySet::new(vec![], None).is_err());
    }

    #[test]
    fn list_assigns_one_based_ranks() {
        let a = Listing::new("a", 0.0, 0.0, -1.0).unwrap();
        let b = Listing::new("b", 0.0, 0.0, -2.0).unwrap();
        let display = DisplaySet::list(vec![a, b]).unwrap();
        let ranks: Vec<_> = display.items().iter().map(|i| i.list_rank).collect();
        assert_eq!(ranks, [Some(1), Some(2)]);
        assert_eq!(display.count_tier(PinTier::None), 2);
    }
}
