//! Experiment harness.
//!
//! An [`Experiment`] turns an inventory into arms. Each [`Arm`] pairs a
//! display policy with a simulated user and the analytic booking probability
//! the policy should produce. The runner simulates sessions per arm from
//! counter-derived seeds and aggregates them in session order, so the report
//! does not depend on how many threads ran the sessions.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiments::{AlphaSweep, CenterOpt, MiniPin, ShuffleList, ShuffleMap, Urgency3Arm};
use super::seed::{derive_seed, session_rng};
use super::session::simulate_session_with;
use super::stats::{bernoulli_ci95, percentile_nearest_rank};
use super::user::UserModel;
use crate::attention_model::TierWeights;
use crate::display::{DisplaySet, PinTier};
use crate::error::{Error, Result};
use crate::listing::Listing;
use crate::ndcg::ndcg_of_gains;
use crate::selection::DEFAULT_MAX_PINS;
use crate::surface::{AttentionSurface, DEFAULT_RESOLUTION};

/// Parameters of the synthetic radial attention surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub peak_ctr: f64,
    pub decay_scale: f64,
    pub horizontal_shift: f64,
    pub resolution: usize,
}

impl Default for SurfaceParams {
    fn default() -> Self {
        Self {
            peak_ctr: 0.3,
            decay_scale: 0.2,
            horizontal_shift: 0.0,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl SurfaceParams {
    pub fn build(&self) -> Result<AttentionSurface> {
        AttentionSurface::synthetic_radial(
            self.peak_ctr,
            self.decay_scale,
            self.horizontal_shift,
            self.resolution,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sessions: usize,
    pub seed: u64,
    pub max_pins: usize,
    /// Filter strength for the urgency and mini-pin experiments.
    pub alpha: f64,
    /// Treatments of the alpha sweep.
    pub alphas: Vec<f64>,
    /// Anchor strategy name for every filtered arm.
    pub anchor: String,
    pub click_propensity: f64,
    /// Positional attention for list users; `1/i` when absent.
    pub list_weights: Option<Vec<f64>>,
    pub tier_weights: TierWeights,
    pub surface: SurfaceParams,
    /// Grid step of the map-center search.
    pub epsilon: f64,
    /// Run sessions on the rayon pool. Never changes the report.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sessions: 10_000,
            seed: 0,
            max_pins: DEFAULT_MAX_PINS,
            alpha: 1.0,
            alphas: vec![1.0, 2.0, 4.0, 8.0],
            anchor: "topmost".into(),
            click_propensity: 0.1,
            list_weights: None,
            tier_weights: TierWeights::default(),
            surface: SurfaceParams::default(),
            epsilon: 0.02,
            parallel: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sessions == 0 {
            return Err(Error::InvalidConfig("sessions must be >= 1".into()));
        }
        if self.max_pins == 0 {
            return Err(Error::InvalidConfig("max_pins must be >= 1".into()));
        }
        self.tier_weights.validate()
    }
}

/// Produces the display for one session of an arm.
pub trait DisplayPolicy: Send + Sync {
    fn display(&self, rng: &mut ChaCha8Rng) -> Result<Cow<'_, DisplaySet>>;
}

pub struct Arm {
    pub name: String,
    pub user: UserModel,
    pub policy: Box<dyn DisplayPolicy>,
    /// Expected booking probability of a session, averaged over whatever
    /// randomization the policy applies.
    pub analytic_expected: f64,
    /// Whether the arm is a ranked list scored by NDCG.
    pub ndcg: bool,
}

/// A named family of arms built from one inventory.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn arms(&self, inventory: &[Listing], cfg: &ExperimentConfig) -> Result<Vec<Arm>>;
}

#[derive(Clone)]
pub struct ExperimentRegistry {
    experiments: BTreeMap<&'static str, Arc<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            experiments: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Arc::new(ShuffleMap));
        registry.register(Arc::new(ShuffleList));
        registry.register(Arc::new(AlphaSweep));
        registry.register(Arc::new(Urgency3Arm));
        registry.register(Arc::new(MiniPin));
        registry.register(Arc::new(CenterOpt));
        registry
    }

    pub fn register(&mut self, experiment: Arc<dyn Experiment>) {
        self.experiments.insert(experiment.name(), experiment);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Experiment>> {
        self.experiments
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Unknown {
                kind: "experiment",
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.experiments.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn Experiment>> {
        self.experiments.values()
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmReport {
    pub arm: String,
    pub seed: u64,
    pub sessions: u64,
    pub bookings: u64,
    pub booking_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic_expected: f64,
    pub ndcg: Option<f64>,
    pub pins_mean: f64,
    pub regular_pins_mean: f64,
    pub avg_pin_prob: f64,
    /// Mean over booking sessions.
    pub impressions_to_discovery: Option<f64>,
    pub clicks_to_discovery: Option<f64>,
    pub click_through_rate: f64,
    pub distinct_clicks_p95: usize,
    pub price_mean: Option<f64>,
    pub reviews_mean: Option<f64>,
}

impl ArmReport {
    /// Standard error of the booking rate.
    pub fn booking_se(&self) -> f64 {
        let p = self.booking_rate;
        (p * (1.0 - p) / self.sessions as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub sessions: usize,
    pub inventory_size: usize,
    pub config: ExperimentConfig,
    pub arms: Vec<ArmReport>,
}

impl ExperimentReport {
    pub fn arm(&self, name: &str) -> Option<&ArmReport> {
        self.arms.iter().find(|a| a.arm == name)
    }
}

struct SessionSummary {
    booked: bool,
    impressions_before: Option<usize>,
    clicks_before: Option<usize>,
    clicks: usize,
    shown: usize,
    regular: usize,
    avg_prob: f64,
    ndcg: Option<f64>,
    price: Option<f64>,
    reviews: Option<f64>,
}

fn mean_of<I: Iterator<Item = f64>>(values: I) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn run_session(arm: &Arm, arm_seed: u64, session: u64) -> Result<SessionSummary> {
    let mut rng = session_rng(arm_seed, session);
    let display = arm.policy.display(&mut rng)?;
    let outcome = simulate_session_with(&display, &arm.user, &mut rng)?;
    let probabilities: Vec<f64> = display
        .listings()
        .map(Listing::booking_probability)
        .collect();
    Ok(SessionSummary {
        booked: outcome.booked.is_some(),
        impressions_before: outcome.impressions_before_booking,
        clicks_before: outcome.clicks_before_booking,
        clicks: outcome.clicked.len(),
        shown: display.len(),
        regular: display.count_tier(PinTier::Regular),
        avg_prob: display.mean_probability(),
        ndcg: arm
            .ndcg
            .then(|| ndcg_of_gains(&probabilities, probabilities.len())),
        price: mean_of(display.listings().filter_map(|l| l.price)),
        reviews: mean_of(display.listings().filter_map(|l| l.reviews.map(f64::from))),
    })
}

fn run_arm(arm: &Arm, arm_seed: u64, cfg: &ExperimentConfig) -> Result<ArmReport> {
    let n = cfg.sessions as u64;
    let summaries: Vec<SessionSummary> = if cfg.parallel {
        (0..n)
            .into_par_iter()
            .map(|s| run_session(arm, arm_seed, s))
            .collect::<Result<_>>()?
    } else {
        (0..n)
            .map(|s| run_session(arm, arm_seed, s))
            .collect::<Result<_>>()?
    };

    let bookings = summaries.iter().filter(|s| s.booked).count() as u64;
    let (ci_low, ci_high) = bernoulli_ci95(bookings, n);
    let clicks: usize = summaries.iter().map(|s| s.clicks).sum();
    let shown: usize = summaries.iter().map(|s| s.shown).sum();
    let distinct: Vec<usize> = summaries.iter().map(|s| s.clicks).collect();
    Ok(ArmReport {
        arm: arm.name.clone(),
        seed: arm_seed,
        sessions: n,
        bookings,
        booking_rate: bookings as f64 / n as f64,
        ci_low,
        ci_high,
        analytic_expected: arm.analytic_expected,
        ndcg: if arm.ndcg {
            mean_of(summaries.iter().filter_map(|s| s.ndcg))
        } else {
            None
        },
        pins_mean: shown as f64 / n as f64,
        regular_pins_mean: summaries.iter().map(|s| s.regular as f64).sum::<f64>() / n as f64,
        avg_pin_prob: summaries.iter().map(|s| s.avg_prob).sum::<f64>() / n as f64,
        impressions_to_discovery: mean_of(
            summaries
                .iter()
                .filter_map(|s| s.impressions_before.map(|v| v as f64)),
        ),
        clicks_to_discovery: mean_of(
            summaries
                .iter()
                .filter_map(|s| s.clicks_before.map(|v| v as f64)),
        ),
        click_through_rate: if shown > 0 {
            clicks as f64 / shown as f64
        } else {
            0.0
        },
        distinct_clicks_p95: percentile_nearest_rank(&distinct, 0.95).unwrap_or(0),
        price_mean: mean_of(summaries.iter().filter_map(|s| s.price)),
        reviews_mean: mean_of(summaries.iter().filter_map(|s| s.reviews)),
    })
}

/// Runs a built-in experiment by name.
pub fn run_experiment(
    name: &str,
    inventory: &[Listing],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    run_experiment_with(&ExperimentRegistry::with_builtins(), name, inventory, cfg)
}

pub fn run_experiment_with(
    registry: &ExperimentRegistry,
    name: &str,
    inventory: &[Listing],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    let experiment = registry.get(name)?;
    cfg.validate()?;
    if inventory.is_empty() {
        return Err(Error::Empty("experiment inventory"));
    }
    let arms = experiment.arms(inventory, cfg)?;
    let reports = arms
        .iter()
        .enumerate()
        .map(|(i, arm)| run_arm(arm, derive_seed(cfg.seed, i as u64), cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        experiment: experiment.name().to_string(),
        seed: cfg.seed,
        sessions: cfg.sessions,
        inventory_size: inventory.len(),
        config: cfg.clone(),
        arms: reports,
    })
}
