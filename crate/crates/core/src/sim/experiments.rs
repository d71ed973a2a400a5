//! The built-in experiments.

use std::borrow::Cow;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand_chacha::ChaCha8Rng;

use super::experiment::{Arm, DisplayPolicy, Experiment, ExperimentConfig};
use super::user::UserModel;
use crate::attention_model::{AttentionModel, PositionalWeights};
use crate::display::{DisplayItem, DisplaySet, PinTier};
use crate::error::Result;
use crate::evaluate::expected_booking;
use crate::listing::{rank_by_logit, Listing, RankedResult};
use crate::placement::{centroid, optimize_center, PlacementConfig};
use crate::selection::{assign_tiers, filter_ranked, AnchorRegistry, FilterConfig};

/// Same display every session.
struct Fixed(DisplaySet);

impl DisplayPolicy for Fixed {
    fn display(&self, _rng: &mut ChaCha8Rng) -> Result<Cow<'_, DisplaySet>> {
        Ok(Cow::Borrowed(&self.0))
    }
}

/// The listings in a fresh uniformly random order every session.
struct Shuffled {
    listings: Vec<Listing>,
    as_list: bool,
}

impl DisplayPolicy for Shuffled {
    fn display(&self, rng: &mut ChaCha8Rng) -> Result<Cow<'_, DisplaySet>> {
        let mut listings = self.listings.clone();
        listings.shuffle(rng);
        let display = if self.as_list {
            DisplaySet::list(listings)?
        } else {
            DisplaySet::pins(listings)?
        };
        Ok(Cow::Owned(display))
    }
}

/// A uniformly random `size`-subset of the listings, redrawn every session,
/// kept in rank order.
struct RandomSubset {
    listings: Vec<Listing>,
    size: usize,
}

impl DisplayPolicy for RandomSubset {
    fn display(&self, rng: &mut ChaCha8Rng) -> Result<Cow<'_, DisplaySet>> {
        let mut picked = index::sample(rng, self.listings.len(), self.size).into_vec();
        picked.sort_unstable();
        let listings = picked
            .into_iter()
            .map(|i| self.listings[i].clone())
            .collect();
        Ok(Cow::Owned(DisplaySet::pins(listings)?))
    }
}

/// Attention averaged over a uniform shuffle or a uniform subset of `pool`
/// is the same for every item, so the expected booking is the pool mean.
/// Computed exactly as a uniform-attention display over the pool.
fn pool_mean(pool: &[Listing]) -> Result<f64> {
    expected_booking(
        &DisplaySet::pins(pool.to_vec())?,
        &AttentionModel::MapUniform,
    )
}

fn top(inventory: &[Listing], cfg: &ExperimentConfig) -> Result<RankedResult> {
    Ok(rank_by_logit(inventory)?.top(cfg.max_pins))
}

fn filter_config(cfg: &ExperimentConfig, alpha: f64) -> Result<FilterConfig> {
    let anchor = AnchorRegistry::with_builtins().get(&cfg.anchor)?;
    FilterConfig::new(alpha, anchor, cfg.max_pins)
}

fn fixed_arm(name: &str, display: DisplaySet, user: &UserModel, ndcg: bool) -> Result<Arm> {
    Ok(Arm {
        name: name.to_string(),
        analytic_expected: expected_booking(&display, &user.attention)?,
        user: user.clone(),
        policy: Box::new(Fixed(display)),
        ndcg,
    })
}

fn uniform_user(cfg: &ExperimentConfig) -> Result<UserModel> {
    UserModel::new(AttentionModel::MapUniform, cfg.click_propensity)
}

/// Top pins in rank order against the same pins shuffled; map users.
pub struct ShuffleMap;

impl Experiment for ShuffleMap {
    fn name(&self) -> &'static str {
        "shuffle_map"
    }

    fn description(&self) -> &'static str {
        "top pins vs the same pins in random order, uniform map attention"
    }

    fn arms(&self, inventory: &[Listing], cfg: &ExperimentConfig) -> Result<Vec<Arm>> {
        let pins = top(inventory, cfg)?.into_listings();
        let user = uniform_user(cfg)?;
        let control = fixed_arm("control", DisplaySet::pins(pins.clone())?, &user, false)?;
        let treatment = Arm {
            name: "shuffled".into(),
            analytic_expected: pool_mean(&pins)?,
            user,
            policy: Box::new(Shuffled {
                listings: pins,
                as_list: false,
            }),
            ndcg: false,
        };
        Ok(vec![control, treatment])
    }
}

/// Ranked list against the same list shuffled; positional attention.
pub struct ShuffleList;

impl Experiment for ShuffleList {
    fn name(&self) -> &'static str {
        "shuffle_list"
    }

    fn description(&self) -> &'static str {
        "ranked list vs the same list in random order, positional attention"
    }

    fn arms(&self, inventory: &[Listing], cfg: &ExperimentConfig) -> Result<Vec<Arm>> {
        let list = top(inventory, cfg)?.into_listings();
        let weights = match &cfg.list_weights {
            Some(w) => PositionalWeights::new(w.clone())?,
            None => PositionalWeights::harmonic(list.len()),
        };
        let user = UserModel::new(
            AttentionModel::ListPositional(weights),
            cfg.click_propensity,
        )?;
        let control = fixed_arm("control", DisplaySet::list(list.clone())?, &user, true)?;
        let treatment = Arm {
            name: "shuffled".into(),
            analytic_expected: pool_mean(&list)?,
            user,
            policy: Box::new(Shuffled {
                listings: list,
                as_list: true,
            }),
            ndcg: true,
        };
        Ok(vec![control, treatment])
    }
}

fn alpha_label(alpha: f64) -> String {
    if alpha.is_infinite() {
        "inf".into()
    } else {
        format!("{alpha}")
    }
}

/// Unfiltered top pins against the bookability filter at several alphas.
pub struct AlphaSweep;

impl Experiment for AlphaSweep {
    fn name(&self) -> &'static str {
        "alpha_sweep"
    }

    fn description(&self) -> &'static str {
        "no filtering vs the bookability filter at each alpha"
    }

    fn arms(&self, inventory: &[Listing], cfg: &ExperimentConfig) -> Result<Vec<Arm>> {
        let ranked = rank_by_logit(inventory)?;
        let user = uniform_user(cfg)?;
        let mut arms = vec![fixed_arm(
            "control",
            DisplaySet::from_ranked_pins(&ranked.top(cfg.max_pins))?,
            &user,
            false,
        )?];
        for &alpha in &cfg.alphas {
            let kept = filter_ranked(&ranked, &filter_config(cfg, alpha)?, inventory.len())?;
            arms.push(fixed_arm(
                &format!("alpha_{}", alpha_label(alpha)),
                DisplaySet::from_ranked_pins(&kept)?,
                &user,
                false,
            )?);
        }
        Ok(arms)
    }
}

/// Control shows the top pins; T1 the filtered subset; T2 a random subset
/// of the top pins of the same size as T1.
pub struct Urgency3Arm;

impl Experiment for Urgency3Arm {
    fn name(&self) -> &'static str {
        "urgency_3arm"
    }

    fn description(&self) -> &'static str {
        "all top pins vs filtered pins vs equally many random top pins"
    }

    fn arms(&self, inventory: &[Listing], cfg: &ExperimentConfig) -> Result<Vec<Arm>> {
        let ranked = rank_by_logit(inventory)?;
        let baseline = ranked.top(cfg.max_pins).into_listings();
        let kept = filter_ranked(&ranked, &filter_config(cfg, cfg.alpha)?, inventory.len())?;
        let user = uniform_user(cfg)?;
        let control = fixed_arm("control", DisplaySet::pins(baseline.clone())?, &user, false)?;
        let t1 = fixed_arm(
            "t1_filtered",
            DisplaySet::from_ranked_pins(&kept)?,
            &user,
            false,
        )?;
        let t2 = Arm {
            name: "t2_random".into(),
            analytic_expected: pool_mean(&baseline)?,
            user,
            policy: Box::new(RandomSubset {
                listings: baseline,
                size: kept.len(),
            }),
            ndcg: false,
        };
        Ok(vec![control, t1, t2])
    }
}

/// All listed results as regular pins vs the filter's regular/mini split.
pub struct MiniPin;

impl Experiment for MiniPin {
    fn name(&self) -> &'static str {
        "minipin"
    }

    fn description(&self) -> &'static str {
        "all regular pins vs filter-assigned regular and mini pins, tiered attention"
    }

    fn arms(&self, inventory: &[Listing], cfg: &ExperimentConfig) -> Result<Vec<Arm>> {
        let listed = top(inventory, cfg)?;
        let user = UserModel::new(
            AttentionModel::MapTiered(cfg.tier_weights),
            cfg.click_propensity,
        )?;
        let all_regular = listed
            .listings()
            .iter()
            .enumerate()
            .map(|(i, l)| DisplayItem {
                listing: l.clone(),
                list_rank: Some(i + 1),
                tier: PinTier::Regular,
            })
            .collect();
        let control = fixed_arm("control", DisplaySet::new(all_regular, None)?, &user, false)?;
        let tiered = assign_tiers(&listed, &filter_config(cfg, cfg.alpha)?)?;
        let treatment = fixed_arm("tiered", tiered, &user, false)?;
        Ok(vec![control, treatment])
    }
}

/// Top pins centered on their centroid vs on the optimized center.
pub struct CenterOpt;

impl Experiment for CenterOpt {
    fn name(&self) -> &'static str {
        "center_opt"
    }

    fn description(&self) -> &'static str {
        "centroid map center vs grid-optimized center, continuous attention"
    }

    fn arms(&self, inventory: &[Listing], cfg: &ExperimentConfig) -> Result<Vec<Arm>> {
        let surface = Arc::new(cfg.surface.build()?);
        let user = UserModel::new(
            AttentionModel::continuous(surface.clone()),
            cfg.click_propensity,
        )?;
        let placement_cfg = PlacementConfig {
            n_pins: cfg.max_pins,
            epsilon: cfg.epsilon,
            surface,
            start_from_centroid: true,
            parallel: cfg.parallel,
        };
        let placement = optimize_center(inventory, &placement_cfg)?;
        let control_center = centroid(&placement.pins);
        let control = fixed_arm(
            "centroid",
            DisplaySet::pins(placement.pins.clone())?.with_center(control_center),
            &user,
            false,
        )?;
        let treatment = fixed_arm(
            "optimized",
            DisplaySet::pins(placement.pins)?.with_center(placement.center),
            &user,
            false,
        )?;
        Ok(vec![control, treatment])
    }
}
