//! Expected bookings of a displayed result under an attention model.
//!
//! `P(booking) = sum_i a_i * exp(logit_i)` where `a_i` are the model's
//! relative attention weights scaled to sum to one over the display. With
//! uniform map attention this is the plain mean of the pins' booking
//! probabilities.

use crate::attention_model::AttentionModel;
use crate::display::DisplaySet;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct BookingEstimate {
    /// Booking probability with attention normalized over the display.
    pub expected: f64,
    /// `sum_i w_i * p_i` with the model's raw relative weights.
    pub raw: f64,
    pub raw_weights: Vec<f64>,
    pub out_of_support: usize,
}

pub fn evaluate(display: &DisplaySet, attention: &AttentionModel) -> Result<BookingEstimate> {
    let raw = attention.raw_weights(display)?;
    let total = raw.total();
    let mut expected = 0.0;
    let mut raw_sum = 0.0;
    for (item, &w) in display.items().iter().zip(&raw.weights) {
        let p = item.listing.booking_probability();
        raw_sum += w * p;
        if total > 0.0 {
            expected += (w / total) * p;
        }
    }
    Ok(BookingEstimate {
        expected,
        raw: raw_sum,
        raw_weights: raw.weights,
        out_of_support: raw.out_of_support,
    })
}

/// Probability that a session on `display` ends in a booking.
pub fn expected_booking(display: &DisplaySet, attention: &AttentionModel) -> Result<f64> {
    evaluate(display, attention).map(|e| e.expected)
}
