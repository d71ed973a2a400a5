//! Map-center placement.
//!
//! Pins are fixed first, purely by booking probability. The center is then
//! chosen by scanning a grid of candidate centers over the pins' bounding
//! box and keeping the one with the highest attention-weighted booking sum.
//! Cost is one surface lookup per pin per candidate.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::listing::{rank_by_logit, Listing};
use crate::surface::AttentionSurface;

#[derive(Debug, Clone)]
pub struct PlacementConfig {
    pub n_pins: usize,
    /// Grid step between candidate centers.
    pub epsilon: f64,
    pub surface: Arc<AttentionSurface>,
    /// Start the scan with the pins' centroid as the incumbent, so grid
    /// candidates must beat it strictly. Off, the scan is the bare grid.
    pub start_from_centroid: bool,
    /// Evaluate candidate rows on the rayon pool. The result is identical.
    pub parallel: bool,
}

impl PlacementConfig {
    pub fn new(n_pins: usize, epsilon: f64, surface: Arc<AttentionSurface>) -> Result<Self> {
        let cfg = Self {
            n_pins,
            epsilon,
            surface,
            start_from_centroid: true,
            parallel: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pins == 0 {
            return Err(Error::InvalidConfig("n_pins must be >= 1".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub pins: Vec<Listing>,
    pub center: (f64, f64),
    /// Un-normalized `sum_k attention_k * p_k` at `center`.
    pub objective: f64,
    pub candidates: usize,
}

/// Candidate coordinates `min + k * eps` strictly below `max`. A collapsed
/// axis (`max <= min`) has the single candidate `min`.
pub fn candidate_axis(min: f64, max: f64, eps: f64) -> Vec<f64> {
    if max <= min {
        return vec![min];
    }
    (0..)
        .map(|k| min + k as f64 * eps)
        .take_while(|v| *v < max)
        .collect()
}

/// `sum_k relative_attention(x_k - cx, y_k - cy) * P(l_k)`.
pub fn objective(pins: &[Listing], center: (f64, f64), surface: &AttentionSurface) -> f64 {
    let (cx, cy) = center;
    pins.iter()
        .map(|l| surface.relative_attention(l.x - cx, l.y - cy) * l.booking_probability())
        .sum()
}

pub fn centroid(pins: &[Listing]) -> (f64, f64) {
    let n = pins.len() as f64;
    let (sx, sy) = pins
        .iter()
        .fold((0.0, 0.0), |(sx, sy), l| (sx + l.x, sy + l.y));
    (sx / n, sy / n)
}

/// Bounding box of the pins as `((x_min, x_max), (y_min, y_max))`.
pub fn bounding_box(pins: &[Listing]) -> ((f64, f64), (f64, f64)) {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for l in pins {
        x = (x.0.min(l.x), x.1.max(l.x));
        y = (y.0.min(l.y), y.1.max(l.y));
    }
    (x, y)
}

/// Top `n_pins` by logit and the grid center maximizing [`objective`].
/// Scan order is x outer, y inner; the first maximum wins, and with
/// `start_from_centroid` the centroid counts as the first candidate.
pub fn optimize_center(listings: &[Listing], cfg: &PlacementConfig) -> Result<Placement> {
    cfg.validate()?;
    let pins = rank_by_logit(listings)?.top(cfg.n_pins).into_listings();
    let ((x_min, x_max), (y_min, y_max)) = bounding_box(&pins);
    let xs = candidate_axis(x_min, x_max, cfg.epsilon);
    let ys = candidate_axis(y_min, y_max, cfg.epsilon);
    let surface = cfg.surface.as_ref();

    let best_in_row = |i: f64| -> (f64, f64) {
        let mut best = (ys[0], f64::NEG_INFINITY);
        for &j in &ys {
            let value = objective(&pins, (i, j), surface);
            if best.1 < value {
                best = (j, value);
            }
        }
        best
    };

    let rows: Vec<(f64, f64)> = if cfg.parallel {
        xs.par_iter().map(|&i| best_in_row(i)).collect()
    } else {
        xs.iter().map(|&i| best_in_row(i)).collect()
    };

    let (mut center, mut max_booking) = if cfg.start_from_centroid {
        let c = centroid(&pins);
        (c, objective(&pins, c, surface))
    } else {
        ((xs[0], ys[0]), f64::NEG_INFINITY)
    };
    for (&i, &(j, value)) in xs.iter().zip(&rows) {
        if max_booking < value {
            center = (i, j);
            max_booking = value;
        }
    }

    Ok(Placement {
        pins,
        center,
        objective: max_booking,
        candidates: xs.len() * ys.len() + usize::from(cfg.start_from_centroid),
    })
}
