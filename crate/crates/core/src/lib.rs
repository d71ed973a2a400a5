//! Map-aware search result construction.
//!
//! Bookings from a displayed result are modeled as attention-weighted booking
//! probabilities. On top of that sit the pin selection filter, tiered pins,
//! click-through attention surfaces, map-center placement, and a simulator
//! that runs A/B experiments against synthetic users.

pub mod attention_model;
pub mod display;
pub mod error;
pub mod evaluate;
pub mod listing;
pub mod ndcg;
pub mod placement;
pub mod selection;
pub mod sim;
pub mod surface;

pub use attention_model::{AttentionModel, PositionalWeights, TierWeights};
pub use display::{DisplayItem, DisplaySet, PinTier};
pub use error::{Error, Result};
pub use evaluate::{evaluate, expected_booking, BookingEstimate};
pub use listing::{booking_probability, rank_by_logit, Listing, RankedResult};
pub use ndcg::ndcg;
pub use surface::AttentionSurface;
