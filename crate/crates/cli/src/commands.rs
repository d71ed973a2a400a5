use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use serde::Serialize;

use mapsearch::placement::{centroid, objective, optimize_center, PlacementConfig};
use mapsearch::sim::{
    generate_click_log, generate_inventory, run_experiment, ClickLogConfig, ExperimentConfig,
    ExperimentReport, InventoryConfig, LogitModel, Spatial, SurfaceParams, UserModel,
};
use mapsearch::surface::{
    ctr_by_rank_curve, estimate_surface_par, rank_distance_curve, ClickRecord, CurvePoint, RankKey,
};
use mapsearch::{AttentionModel, AttentionSurface, PinTier, TierWeights};

use crate::error::{CliError, USAGE};
use crate::io::{
    emit, ensure_distinct, fmt_num, fmt_opt, read_inventory, read_json, read_json_lines, sibling,
    to_csv, to_json_lines, to_json_pretty,
};

type CmdResult = Result<(), CliError>;

#[derive(Debug, Args)]
pub struct LogitArgs {
    /// Logit of a listing at the viewport center before noise.
    #[arg(long, default_value_t = LogitModel::default().base, allow_negative_numbers = true)]
    pub base: f64,
    /// Logit lost per unit of distance from the center.
    #[arg(long, default_value_t = LogitModel::default().distance_coeff)]
    pub beta: f64,
    /// Standard deviation of the per-listing logit noise.
    #[arg(long, default_value_t = LogitModel::default().noise_sd)]
    pub noise_sd: f64,
}

impl LogitArgs {
    fn model(&self) -> LogitModel {
        LogitModel {
            base: self.base,
            distance_coeff: self.beta,
            noise_sd: self.noise_sd,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpatialArgs {
    /// Draw locations around this many cluster centers instead of uniformly.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Standard deviation of a cluster.
    #[arg(long, default_value_t = 0.08)]
    pub spread: f64,
}

impl SpatialArgs {
    fn spatial(&self) -> Spatial {
        match self.clusters {
            Some(clusters) => Spatial::Clustered {
                clusters,
                spread: self.spread,
            },
            None => Spatial::Uniform,
        }
    }
}

#[derive(Debug, Args)]
pub struct SyntheticSurfaceArgs {
    /// Click-through rate at the attention peak.
    #[arg(long, default_value_t = SurfaceParams::default().peak_ctr)]
    pub peak_ctr: f64,
    /// Distance from the peak at which attention falls to exp(-1/2) of it.
    #[arg(long, default_value_t = SurfaceParams::default().decay_scale)]
    pub decay_scale: f64,
    /// Horizontal offset of the attention peak; negative moves it left.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift: f64,
    /// Surface cells per axis; odd.
    #[arg(long, default_value_t = SurfaceParams::default().resolution)]
    pub resolution: usize,
}

impl SyntheticSurfaceArgs {
    fn params(&self) -> SurfaceParams {
        SurfaceParams {
            peak_ctr: self.peak_ctr,
            decay_scale: self.decay_scale,
            horizontal_shift: self.shift,
            resolution: self.resolution,
        }
    }
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// Estimated surface JSON; replaces the synthetic surface.
    #[arg(long)]
    pub surface: Option<PathBuf>,
    #[command(flatten)]
    pub synthetic: SyntheticSurfaceArgs,
}

impl SurfaceArgs {
    fn load(&self) -> Result<AttentionSurface, CliError> {
        match &self.surface {
            Some(path) => read_json(path),
            None => Ok(self.synthetic.params().build()?),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenInventory {
    /// Number of listings.
    #[arg(long)]
    pub n: usize,
    /// Seed of every random draw.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub logit: LogitArgs,
    #[command(flatten)]
    pub spatial: SpatialArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen_inventory(args: &GenInventory) -> CmdResult {
    let inventory = generate_inventory(&InventoryConfig {
        n_listings: args.n,
        spatial: args.spatial.spatial(),
        logit: args.logit.model(),
        seed: args.seed,
    })?;
    emit(args.out.as_deref(), &to_json_lines(&inventory))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UserKind {
    /// Same attention for every pin.
    Uniform,
    /// Attention 1/rank down the result list.
    List,
    /// Attention from the surface at each pin's offset.
    Continuous,
}

#[derive(Debug, Args)]
pub struct GenClicks {
    /// Queries simulated; each gets a fresh inventory.
    #[arg(long)]
    pub queries: usize,
    /// Listings generated per query.
    #[arg(long, default_value_t = 200)]
    pub listings: usize,
    /// Top listings shown as pins per query.
    #[arg(long, default_value_t = 18)]
    pub pins: usize,
    #[arg(long, value_enum, default_value_t = UserKind::Continuous)]
    pub user: UserKind,
    /// Click probability at full attention.
    #[arg(long, default_value_t = 0.3)]
    pub click_propensity: f64,
    /// Seed of every random draw.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub logit: LogitArgs,
    #[command(flatten)]
    pub spatial: SpatialArgs,
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen_clicks(args: &GenClicks) -> CmdResult {
    if let Some(s) = &args.surface.surface {
        ensure_distinct(&[s], &[args.out.as_deref()])?;
    }
    let attention = match args.user {
        UserKind::Uniform => AttentionModel::MapUniform,
        UserKind::List => AttentionModel::harmonic_list(args.pins),
        UserKind::Continuous => AttentionModel::continuous(Arc::new(args.surface.load()?)),
    };
    let logs = generate_click_log(&ClickLogConfig {
        queries: args.queries,
        inventory: InventoryConfig {
            n_listings: args.listings,
            spatial: args.spatial.spatial(),
            logit: args.logit.model(),
            seed: 0,
        },
        pins: args.pins,
        user: UserModel::new(attention, args.click_propensity)?,
        seed: args.seed,
        parallel: true,
    })?;
    emit(args.out.as_deref(), &to_json_lines(&logs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RunExp {
    /// shuffle_map, shuffle_list, alpha_sweep, urgency_3arm, minipin or center_opt.
    #[arg(long)]
    pub experiment: String,
    /// Inventory file (one JSON listing per line).
    #[arg(long)]
    pub inventory: PathBuf,
    /// Seed of every random draw.
    #[arg(long)]
    pub seed: u64,
    /// Sessions per arm.
    #[arg(long, default_value_t = ExperimentConfig::default().sessions)]
    pub sessions: usize,
    /// Pins shown, best by logit, before any filtering.
    #[arg(long, default_value_t = ExperimentConfig::default().max_pins)]
    pub max_pins: usize,
    /// Filter strength of the filtered arms; `inf` disables filtering.
    #[arg(long, default_value_t = ExperimentConfig::default().alpha)]
    pub alpha: f64,
    /// Comma-separated treatments of the alpha sweep.
    #[arg(long, value_delimiter = ',', default_values_t = ExperimentConfig::default().alphas)]
    pub alphas: Vec<f64>,
    /// topmost, median-top3 or adaptive-rank.
    #[arg(long, default_value_t = ExperimentConfig::default().anchor)]
    pub anchor: String,
    /// Click probability at full attention.
    #[arg(long, default_value_t = ExperimentConfig::default().click_propensity)]
    pub click_propensity: f64,
    /// Comma-separated positional attention for list users; 1/rank when absent.
    #[arg(long, value_delimiter = ',')]
    pub list_weights: Option<Vec<f64>>,
    /// Attention of a mini pin relative to a regular one.
    #[arg(long, default_value_t = TierWeights::default().mini)]
    pub mini_weight: f64,
    /// Grid step of the map-center search.
    #[arg(long, default_value_t = ExperimentConfig::default().epsilon)]
    pub epsilon: f64,
    #[command(flatten)]
    pub surface: SyntheticSurfaceArgs,
    /// Report format; csv also writes the JSON report alongside when --out is set.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Full JSON report next to a CSV report; defaults to the CSV path with a
    /// .json extension.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub const REPORT_COLUMNS: [&str; 12] = [
    "arm",
    "sessions",
    "bookings",
    "booking_rate",
    "ci_low",
    "ci_high",
    "analytic_expected",
    "ndcg",
    "pins_mean",
    "avg_pin_prob",
    "impressions_to_discovery",
    "clicks_to_discovery",
];

pub fn report_csv(report: &ExperimentReport) -> String {
    let rows: Vec<Vec<String>> = report
        .arms
        .iter()
        .map(|a| {
            vec![
                a.arm.clone(),
                a.sessions.to_string(),
                a.bookings.to_string(),
                fmt_num(a.booking_rate),
                fmt_num(a.ci_low),
                fmt_num(a.ci_high),
                fmt_num(a.analytic_expected),
                fmt_opt(a.ndcg),
                fmt_num(a.pins_mean),
                fmt_num(a.avg_pin_prob),
                fmt_opt(a.impressions_to_discovery),
                fmt_opt(a.clicks_to_discovery),
            ]
        })
        .collect();
    to_csv(&REPORT_COLUMNS, &rows)
}

pub fn run_exp(args: &RunExp) -> CmdResult {
    let sidecar = match (args.format, &args.json, &args.out) {
        (Format::Json, _, _) => None,
        (Format::Csv, Some(path), _) => Some(path.clone()),
        (Format::Csv, None, Some(out)) => Some(sibling(out, "json")),
        (Format::Csv, None, None) => None,
    };
    if sidecar.is_some() && sidecar == args.out {
        return Err(CliError::new(
            USAGE,
            "the JSON report and the CSV report need different paths",
        ));
    }
    ensure_distinct(
        &[&args.inventory],
        &[args.out.as_deref(), sidecar.as_deref()],
    )?;

    let inventory = read_inventory(&args.inventory)?;
    let defaults = ExperimentConfig::default();
    let cfg = ExperimentConfig {
        sessions: args.sessions,
        seed: args.seed,
        max_pins: args.max_pins,
        alpha: args.alpha,
        alphas: args.alphas.clone(),
        anchor: args.anchor.clone(),
        click_propensity: args.click_propensity,
        list_weights: args.list_weights.clone(),
        tier_weights: TierWeights {
            mini: args.mini_weight,
            ..defaults.tier_weights
        },
        surface: args.surface.params(),
        epsilon: args.epsilon,
        parallel: true,
    };
    let report = run_experiment(&args.experiment, &inventory, &cfg)?;
    match args.format {
        Format::Json => emit(args.out.as_deref(), &to_json_pretty(&report)),
        Format::Csv => {
            emit(args.out.as_deref(), &report_csv(&report))?;
            match &sidecar {
                Some(path) => emit(Some(path), &to_json_pretty(&report)),
                None => Ok(()),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TierArg {
    Regular,
    Mini,
}

#[derive(Debug, Args)]
pub struct EstimateSurface {
    /// Click log (one JSON record per line).
    #[arg(long)]
    pub clicks: PathBuf,
    /// Cells per axis; odd.
    #[arg(long, default_value_t = mapsearch::surface::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Cells with fewer impressions are filled from their neighbors.
    #[arg(long, default_value_t = 10)]
    pub min_impressions: u64,
    /// Use only records of this pin tier.
    #[arg(long, value_enum)]
    pub tier: Option<TierArg>,
    /// Surface JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-cell relative attention CSV; defaults to the JSON path with a
    /// .csv extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn surface_csv(surface: &AttentionSurface) -> String {
    let half = (surface.resolution() / 2) as i64;
    let rows: Vec<Vec<String>> = surface
        .cells()
        .map(|(ix, iy)| {
            vec![
                (ix as i64 - half).to_string(),
                (iy as i64 - half).to_string(),
                fmt_num(surface.relative_attention_at_cell(ix, iy)),
            ]
        })
        .collect();
    to_csv(&["dx_cell", "dy_cell", "relative_attention"], &rows)
}

pub fn estimate_surface(args: &EstimateSurface) -> CmdResult {
    let csv_path = args
        .csv
        .clone()
        .or_else(|| args.out.as_deref().map(|p| sibling(p, "csv")));
    if csv_path.is_some() && csv_path == args.out {
        return Err(CliError::new(
            USAGE,
            "the surface JSON and CSV need different paths",
        ));
    }
    ensure_distinct(&[&args.clicks], &[args.out.as_deref(), csv_path.as_deref()])?;
    let logs: Vec<ClickRecord> = read_json_lines(&args.clicks)?
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    let tier = args.tier.map(|t| match t {
        TierArg::Regular => PinTier::Regular,
        TierArg::Mini => PinTier::Mini,
    });
    let estimate = estimate_surface_par(&logs, args.resolution, args.min_impressions, tier)?;
    emit(args.out.as_deref(), &to_json_pretty(&estimate.surface))?;
    match &csv_path {
        Some(path) => emit(Some(path), &surface_csv(&estimate.surface)),
        None => Ok(()),
    }
}

#[derive(Debug, Args)]
pub struct Curves {
    /// Click log (one JSON record per line).
    #[arg(long)]
    pub clicks: PathBuf,
    /// Directory for search_rank.csv, distance_rank.csv and rank_distance.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Distance bins of the rank-distance curve.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Distances at or beyond this fall in the last bin.
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub max_distance: f64,
}

fn curve_csv(curve: &[CurvePoint]) -> String {
    let rows: Vec<Vec<String>> = curve
        .iter()
        .map(|p| {
            vec![
                p.rank.to_string(),
                p.impressions.to_string(),
                p.clicks.to_string(),
                fmt_num(p.ctr),
                fmt_num(p.normalized),
            ]
        })
        .collect();
    to_csv(
        &["rank", "impressions", "clicks", "ctr", "normalized_ctr"],
        &rows,
    )
}

pub fn curves(args: &Curves) -> CmdResult {
    let logs: Vec<ClickRecord> = read_json_lines(&args.clicks)?
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    let by_search = ctr_by_rank_curve(&logs, RankKey::SearchRank)?;
    let by_distance = ctr_by_rank_curve(&logs, RankKey::DistanceRank)?;
    let rank_distance = rank_distance_curve(&logs, args.bins, args.max_distance)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::output(&args.out_dir, e))?;

    let transform_rows: Vec<Vec<String>> = rank_distance
        .iter()
        .map(|p| {
            vec![
                fmt_num(p.distance),
                p.count.to_string(),
                fmt_num(p.avg_rank),
                fmt_num(p.transformed),
            ]
        })
        .collect();
    let outputs = [
        ("search_rank.csv", curve_csv(&by_search)),
        ("distance_rank.csv", curve_csv(&by_distance)),
        (
            "rank_distance.csv",
            to_csv(
                &["distance", "impressions", "avg_rank", "transform"],
                &transform_rows,
            ),
        ),
    ];
    let paths: Vec<PathBuf> = outputs
        .iter()
        .map(|(name, _)| args.out_dir.join(name))
        .collect();
    ensure_distinct(
        &[&args.clicks],
        &paths.iter().map(|p| Some(p.as_path())).collect::<Vec<_>>(),
    )?;
    for (path, (_, contents)) in paths.iter().zip(&outputs) {
        emit(Some(path), contents)?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct OptimizeCenter {
    /// Inventory file (one JSON listing per line).
    #[arg(long)]
    pub inventory: PathBuf,
    /// Pins kept, best by logit.
    #[arg(long, default_value_t = 18)]
    pub n_pins: usize,
    /// Grid step of the center search.
    #[arg(long, default_value_t = 0.02)]
    pub epsilon: f64,
    /// Scan the grid alone, without the centroid as the starting candidate.
    #[arg(long)]
    pub grid_only: bool,
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Placement JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PlacementReport {
    center: (f64, f64),
    objective: f64,
    centroid: (f64, f64),
    centroid_objective: f64,
    candidates: usize,
    epsilon: f64,
    pins: Vec<String>,
}

pub fn optimize(args: &OptimizeCenter) -> CmdResult {
    let mut inputs: Vec<&Path> = vec![&args.inventory];
    if let Some(s) = &args.surface.surface {
        inputs.push(s);
    }
    ensure_distinct(&inputs, &[args.out.as_deref()])?;
    let inventory = read_inventory(&args.inventory)?;
    let surface = Arc::new(args.surface.load()?);
    let mut cfg = PlacementConfig::new(args.n_pins, args.epsilon, surface.clone())?;
    cfg.start_from_centroid = !args.grid_only;
    cfg.parallel = true;
    let placement = optimize_center(&inventory, &cfg)?;
    let c = centroid(&placement.pins);
    let report = PlacementReport {
        center: placement.center,
        objective: placement.objective,
        centroid: c,
        centroid_objective: objective(&placement.pins, c, &surface),
        candidates: placement.candidates,
        epsilon: args.epsilon,
        pins: placement.pins.iter().map(|l| l.id.clone()).collect(),
    };
    emit(args.out.as_deref(), &to_json_pretty(&report))
}
