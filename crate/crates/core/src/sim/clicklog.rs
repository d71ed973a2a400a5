//! Synthetic map click logs.
//!
//! Each query gets its own inventory, shows its top listings as regular pins
//! around the origin, and one simulated session decides which pins are
//! clicked.

use rayon::prelude::*;

use super::inventory::{generate_inventory, InventoryConfig};
use super::seed::{derive_seed, session_rng};
use super::session::simulate_session_with;
use super::user::UserModel;
use crate::display::DisplaySet;
use crate::error::Result;
use crate::listing::rank_by_logit;
use crate::surface::ClickRecord;

#[derive(Debug, Clone)]
pub struct ClickLogConfig {
    pub queries: usize,
    /// Template for every query's inventory; its seed is replaced per query.
    pub inventory: InventoryConfig,
    /// Pins shown per query (top by logit).
    pub pins: usize,
    pub user: UserModel,
    pub seed: u64,
    pub parallel: bool,
}

pub fn generate_click_log(cfg: &ClickLogConfig) -> Result<Vec<ClickRecord>> {
    cfg.user.validate()?;
    let one = |q: usize| -> Result<Vec<ClickRecord>> {
        let query_seed = derive_seed(cfg.seed, q as u64);
        let inventory = generate_inventory(&InventoryConfig {
            seed: query_seed,
            ..cfg.inventory.clone()
        })?;
        if inventory.is_empty() {
            return Ok(Vec::new());
        }
        let pins = rank_by_logit(&inventory)?.top(cfg.pins.max(1));
        let display = DisplaySet::from_ranked_pins(&pins)?.with_center((0.0, 0.0));
        let outcome = simulate_session_with(&display, &cfg.user, &mut session_rng(query_seed, 1))?;

        let mut by_distance: Vec<usize> = (0..display.len()).collect();
        let items = display.items();
        by_distance.sort_by(|&a, &b| {
            let (la, lb) = (&items[a].listing, &items[b].listing);
            la.distance_from_origin()
                .total_cmp(&lb.distance_from_origin())
                .then_with(|| la.id.cmp(&lb.id))
        });
        let mut distance_rank = vec![0; items.len()];
        for (r, &i) in by_distance.iter().enumerate() {
            distance_rank[i] = r + 1;
        }

        let query_id = format!("q{q:07}");
        Ok(items
            .iter()
            .enumerate()
            .map(|(i, item)| ClickRecord {
                query_id: query_id.clone(),
                dx: item.listing.x,
                dy: item.listing.y,
                clicked: outcome.click_flags[i],
                tier: item.tier,
                rank: i + 1,
                distance_rank: distance_rank[i],
            })
            .collect())
    };

    let per_query: Vec<Vec<ClickRecord>> = if cfg.parallel {
        (0..cfg.queries)
            .into_par_iter()
            .map(one)
            .collect::<Result<_>>()?
    } else {
        (0..cfg.queries).map(one).collect::<Result<_>>()?
    };
    Ok(per_query.into_iter().flatten().collect())
}
