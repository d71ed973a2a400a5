//! One simulated search session.
//!
//! Booking follows a single-examination model: the user attends one item
//! drawn from the normalized attention distribution and books it with its
//! booking probability. The marginal booking probability is therefore exactly
//! the attention-weighted expectation computed by [`crate::evaluate`].
//!
//! Clicks are drawn independently of the booking: item `i` is clicked with
//! probability `min(1, click_propensity * w_i)` where `w_i` is its raw
//! relative attention. They feed the CTR curves and leave booking marginals
//! untouched.

use rand::Rng;

use super::seed::session_rng;
use super::user::{ExaminationOrder, UserModel};
use crate::display::DisplaySet;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    /// Ids in display order.
    pub displayed: Vec<String>,
    /// Per displayed item, in display order.
    pub click_flags: Vec<bool>,
    /// Clicked ids in examination order.
    pub clicked: Vec<String>,
    pub booked: Option<String>,
    /// Display index of the booked item.
    pub booked_index: Option<usize>,
    /// Items examined before reaching the booked one.
    pub impressions_before_booking: Option<usize>,
    /// Clicked items examined before reaching the booked one.
    pub clicks_before_booking: Option<usize>,
}

pub fn simulate_session(
    display: &DisplaySet,
    user: &UserModel,
    seed: u64,
) -> Result<SessionOutcome> {
    simulate_session_with(display, user, &mut session_rng(seed, 0))
}

pub fn simulate_session_with<R: Rng + ?Sized>(
    display: &DisplaySet,
    user: &UserModel,
    rng: &mut R,
) -> Result<SessionOutcome> {
    let raw = user.attention.raw_weights(display)?;
    let total = raw.total();
    let items = display.items();

    // Attend one item, then book it with its probability.
    let u: f64 = rng.random();
    let book_draw: f64 = rng.random();
    let mut booked_index = None;
    if total > 0.0 {
        let target = u * total;
        let mut acc = 0.0;
        let mut attended = None;
        for (i, w) in raw.weights.iter().enumerate() {
            if *w <= 0.0 {
                continue;
            }
            acc += w;
            attended = Some(i);
            if target < acc {
                break;
            }
        }
        if let Some(i) = attended {
            if book_draw < items[i].listing.booking_probability() {
                booked_index = Some(i);
            }
        }
    }

    let click_flags: Vec<bool> = raw
        .weights
        .iter()
        .map(|w| {
            let p = (user.click_propensity * w).min(1.0);
            rng.random::<f64>() < p
        })
        .collect();

    let mut order: Vec<usize> = (0..items.len()).collect();
    match user.order {
        ExaminationOrder::ByRank => order.sort_by(|&a, &b| {
            let ra = items[a].list_rank.unwrap_or(usize::MAX);
            let rb = items[b].list_rank.unwrap_or(usize::MAX);
            ra.cmp(&rb)
                .then_with(|| items[a].listing.id.cmp(&items[b].listing.id))
        }),
        ExaminationOrder::ByAttentionDesc => order.sort_by(|&a, &b| {
            raw.weights[b]
                .total_cmp(&raw.weights[a])
                .then_with(|| items[a].listing.id.cmp(&items[b].listing.id))
        }),
    }

    let clicked = order
        .iter()
        .filter(|&&i| click_flags[i])
        .map(|&i| items[i].listing.id.clone())
        .collect();
    let (impressions_before_booking, clicks_before_booking) = match booked_index {
        Some(b) => {
            let pos = order
                .iter()
                .position(|&i| i == b)
                .expect("booked item is displayed");
            let clicks = order[..pos].iter().filter(|&&i| click_flags[i]).count();
            (Some(pos), Some(clicks))
        }
        None => (None, None),
    };

    Ok(SessionOutcome {
        displayed: items.iter().map(|item| item.listing.id.clone()).collect(),
        click_flags,
        clicked,
        booked: booked_index.map(|i| items[i].listing.id.clone()),
        booked_index,
        impressions_before_booking,
        clicks_before_booking,
    })
}
