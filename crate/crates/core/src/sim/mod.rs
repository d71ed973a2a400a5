//! Synthetic inventories, simulated users and the experiment harness.

mod clicklog;
mod experiment;
mod experiments;
mod inventory;
mod seed;
mod session;
mod stats;
mod user;

pub use clicklog::{generate_click_log, ClickLogConfig};
pub use experiment::{
    run_experiment, run_experiment_with, Arm, ArmReport, DisplayPolicy, Experiment,
    ExperimentConfig, ExperimentRegistry, ExperimentReport, SurfaceParams,
};
pub use experiments::{AlphaSweep, CenterOpt, MiniPin, ShuffleList, ShuffleMap, Urgency3Arm};
pub use inventory::{generate_inventory, InventoryConfig, LogitModel, Spatial};
pub use seed::{derive_seed, session_rng};
pub use session::{simulate_session, simulate_session_with, SessionOutcome};
pub use stats::{bernoulli_ci95, percentile_nearest_rank};
pub use user::{ExaminationOrder, UserModel};
