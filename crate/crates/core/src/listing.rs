//! Listings, the logit/probability relation and logit ranking.
//!
//! A logit is the natural log of a listing's booking probability, so the
//! difference of two logits is exactly the log of their probability ratio.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// A rentable unit as seen by search: where it sits on the map and how
/// likely it is to be booked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Listing {
    pub id: String,
    /// Horizontal offset in viewport units, origin at the viewport center.
    pub x: f64,
    pub y: f64,
    pub logit: f64,
    #[serde(default)]
    pub price: Option<f64>,
    #[serde(default)]
    pub reviews: Option<u32>,
    #[serde(default)]
    pub rating: Option<f64>,
}

impl Listing {
    pub fn new(id: impl Into<String>, x: f64, y: f64, logit: f64) -> Result<Self> {
        let listing = Self {
            id: id.into(),
            x,
            y,
            logit,
            price: None,
            reviews: None,
            rating: None,
        };
        listing.validate()?;
        Ok(listing)
    }

    pub fn with_metadata(
        mut self,
        price: Option<f64>,
        reviews: Option<u32>,
        rating: Option<f64>,
    ) -> Self {
        self.price = price;
        self.reviews = reviews;
        self.rating = rating;
        self
    }

    /// Checks the invariants that deserialization cannot enforce.
    pub fn validate(&self) -> Result<()> {
        ensure_finite("x", self.x)?;
        ensure_finite("y", self.y)?;
        ensure_finite("logit", self.logit)?;
        if self.logit > 0.0 {
            return Err(Error::PositiveLogit(self.logit));
        }
        if let Some(price) = self.price {
            if !(price.is_finite() && price > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "listing `{}` has non-positive price {price}",
                    self.id
                )));
            }
        }
        if let Some(rating) = self.rating {
            if !(0.0..=5.0).contains(&rating) {
                return Err(Error::InvalidConfig(format!(
                    "listing `{}` has rating {rating} outside [0, 5]",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// Booking probability, `exp(logit)`.
    pub fn booking_probability(&self) -> f64 {
        self.logit.exp()
    }

    pub fn distance_from_origin(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Converts a logit to a booking probability.
///
/// Logits are natural-log probabilities, so this is `exp(logit)` and the
/// result lies in `(0, 1]`. A positive logit means the scores were never
/// calibrated as log probabilities and is rejected.
pub fn booking_probability(logit: f64) -> Result<f64> {
    ensure_finite("logit", logit)?;
    if logit > 0.0 {
        return Err(Error::PositiveLogit(logit));
    }
    Ok(logit.exp())
}

/// Descending logit, ties by ascending id.
pub fn logit_order(a: &Listing, b: &Listing) -> Ordering {
    b.logit.total_cmp(&a.logit).then_with(|| a.id.cmp(&b.id))
}

/// Listings in descending logit order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    listings: Vec<Listing>,
}

impl RankedResult {
    pub fn listings(&self) -> &[Listing] {
        &self.listings
    }

    pub fn into_listings(self) -> Vec<Listing> {
        self.listings
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.listings.iter().map(|l| l.id.as_str())
    }

    pub fn logits(&self) -> Vec<f64> {
        self.listings.iter().map(|l| l.logit).collect()
    }

    pub fn len(&self) -> usize {
        self.listings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.listings.is_empty()
    }

    /// The first `n` results, still ranked. Keeps at least nothing; callers
    /// that need a non-empty prefix check `n >= 1` themselves.
    pub fn top(&self, n: usize) -> RankedResult {
        RankedResult {
            listings: self.listings.iter().take(n).cloned().collect(),
        }
    }
}

/// Sorts listings by descending logit with ascending-id tie-breaks.
pub fn rank_by_logit(listings: &[Listing]) -> Result<RankedResult> {
    if listings.is_empty() {
        return Err(Error::Empty("no listings to rank"));
    }
    let mut seen = HashSet::with_capacity(listings.len());
    for listing in listings {
        listing.validate()?;
        if !seen.insert(listing.id.as_str()) {
            return Err(Error::DuplicateId(listing.id.clone()));
        }
    }
    let mut sorted = listings.to_vec();
    sorted.sort_by(logit_order);
    Ok(RankedResult { listings: sorted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(id: &str, logit: f64) -> Listing {
        Listing::new(id, 0.0, 0.0, logit).unwrap()
    }

    #[test]
    fn probability_of_zero_logit_is_one() {
        assert_eq!(booking_probability(0.0).unwrap(), 1.0);
    }

    #[test]
    fn probability_inverts_log() {
        let p = booking_probability(0.5f64.ln()).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn logit_gap_is_log_probability_ratio() {
        let ratio = booking_probability(-1.0).unwrap() / booking_probability(-2.0).unwrap();
        assert!((ratio - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn positive_logit_is_rejected() {
        assert_eq!(booking_probability(0.1), Err(Error::PositiveLogit(0.1)));
        assert!(Listing::new("a", 0.0, 0.0, 0.3).is_err());
    }

    #[test]
    fn ranks_descending_with_id_ties() {
        let ranked = rank_by_logit(&[l("b", -2.0), l("a", -1.0)]).unwrap();
        assert_eq!(ranked.ids().collect::<Vec<_>>(), ["a", "b"]);

        let tied = rank_by_logit(&[l("b", -1.0), l("a", -1.0)]).unwrap();
        assert_eq!(tied.ids().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn rank_rejects_empty_and_duplicates() {
        assert!(matches!(rank_by_logit(&[]), Err(Error::Empty(_))));
        assert_eq!(
            rank_by_logit(&[l("a", -1.0), l("a", -2.0)]),
            Err(Error::DuplicateId("a".into()))
        );
    }
}
