//! Greedy stage-wise discovery of reward-relevant regions.
//!
//! Stage `i` optimizes one new region from several KDE-seeded restarts while
//! the `i − 1` regions already found act as hard indicators. The restart
//! with the lowest hard conditional entropy joins the set.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{marginal_entropy, to_bits, Objective};
use crate::error::{Error, Result};
use crate::kde::{sample_center, InitConfig};
use crate::optimizer::{optimize_with, OptimConfig, OptimTrace};
use crate::reward::RewardAlphabet;
use crate::rng;
use crate::trajectory::{Dataset, Region};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    /// Number of regions to discover.
    pub m: usize,
    pub n_restart: usize,
    pub seed: u64,
    /// `init.seed` is ignored; per-restart seeds derive from `seed`.
    pub init: InitConfig,
    pub opt: OptimConfig,
    /// Stop once a stage gains less than this many nats. Off when `None`.
    pub ig_floor: Option<f64>,
    /// Total gain at or below which the report is flagged `no_structure`.
    pub no_structure_threshold: f64,
    pub deterministic: bool,
    /// Worker threads for restarts; 0 uses the global pool. Never affects output.
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            m: 1,
            n_restart: 8,
            seed: 0,
            init: InitConfig::default(),
            opt: OptimConfig::default(),
            ig_floor: None,
            no_structure_threshold: 0.05,
            deterministic: true,
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub init_center: Vec<f64>,
    pub init_radius: f64,
    pub kde_bandwidth: f64,
    pub alpha0: f64,
    pub lr: f64,
    pub best: Option<Region>,
    /// Hard `H(R | M¹…Mⁱ)` of `best`.
    pub h_hard: Option<f64>,
    pub best_step: Option<usize>,
    pub steps_run: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    /// 1-based.
    pub stage: usize,
    pub h_before: f64,
    pub h_after: f64,
    /// `h_before − h_after`, nats.
    pub ig: f64,
    pub ig_bits: f64,
    /// `H(R) − h_after`, nats.
    pub cumulative_ig: f64,
    pub region: Region,
    /// `None` when the always-on floor candidate won.
    pub chosen_restart: Option<usize>,
    pub floor_h_hard: f64,
    pub restarts: Vec<RestartSummary>,
    /// False when the stage fell under `ig_floor` and was not kept.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryReport {
    pub schema_version: u32,
    pub seed: u64,
    pub reward_values: Vec<f64>,
    pub reward_counts: Vec<usize>,
    pub reward_entropy: f64,
    pub reward_entropy_bits: f64,
    pub regions: Vec<Region>,
    pub stages: Vec<StageReport>,
    pub final_entropy: f64,
    pub final_ig: f64,
    pub early_stop: bool,
    /// Early stopping on `ig_floor` goes beyond the base greedy procedure.
    pub early_stop_is_extension: bool,
    pub no_structure: bool,
    pub success_labels: Vec<usize>,
    pub config: DiscoveryConfig,
    /// Free-form provenance attached by callers (input path, reward clustering).
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub meta: std::collections::BTreeMap<String, String>,
}

impl DiscoveryReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: DiscoveryReport = serde_json::from_str(s)?;
        if r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Schema {
                line: 1,
                message: format!("unsupported report schema version {}", r.schema_version),
            });
        }
        Ok(r)
    }

    /// Plain-text table of stages.
    pub fn table(&self) -> String {
        let mut out = format!(
            "H(R) = {:.4} nats ({:.4} bits), {} region(s){}\n",
            self.reward_entropy,
            self.reward_entropy_bits,
            self.regions.len(),
            if self.early_stop {
                ", stopped early"
            } else {
                ""
            }
        );
        out.push_str(&format!(
            "{:>5}  {:>9}  {:>9}  {:>9}  {:>9}  {:>8}  {:<24}  {:>9}\n",
            "stage", "H_before", "H_after", "IG_nats", "IG_bits", "restart", "center", "radius"
        ));
        for s in &self.stages {
            let center = s
                .region
                .center
                .iter()
                .map(|c| format!("{c:.4}"))
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!(
                "{:>5}  {:>9.4}  {:>9.4}  {:>9.4}  {:>9.4}  {:>8}  {:<24}  {:>9.4}{}\n",
                s.stage,
                s.h_before,
                s.h_after,
                s.ig,
                s.ig_bits,
                s.chosen_restart
                    .map_or_else(|| "floor".to_string(), |r| r.to_string()),
                format!("({center})"),
                s.region.radius,
                if s.accepted { "" } else { "  (rejected)" }
            ));
        }
        if self.no_structure {
            out.push_str("no structure: total information gain is at chance level\n");
        }
        out
    }
}

/// Report plus every restart's optimizer trace, indexed `[stage][restart]`.
#[derive(Debug, Clone)]
pub struct Discovery {
    pub report: DiscoveryReport,
    pub traces: Vec<Vec<Option<OptimTrace>>>,
}

struct RestartOutcome {
    summary: RestartSummary,
    trace: Option<OptimTrace>,
}

fn run_restart(
    objective: &Objective<'_>,
    labels: &RewardAlphabet,
    found: &[Region],
    config: &DiscoveryConfig,
    stage: usize,
    restart: usize,
) -> Result<RestartOutcome> {
    let dataset = objective.dataset();
    let bounds = dataset.radius_bounds();
    let init_cfg = InitConfig {
        seed: rng::derive_seed(config.seed, "kde", &[stage as u64, restart as u64]),
        ..config.init.clone()
    };
    let seed = sample_center(dataset, labels, found, &init_cfg)?;
    let mut eps_rng = rng::stream(config.seed, "radius0", &[stage as u64, restart as u64]);
    let init_radius =
        bounds.project(bounds.min + eps_rng.random::<f64>() * (bounds.max - bounds.min));
    let init = Region {
        center: seed.center.clone(),
        radius: init_radius,
    };
    let settings = config.opt.resolve(dataset, &init, bounds)?;
    let mut summary = RestartSummary {
        restart,
        init_center: seed.center,
        init_radius,
        kde_bandwidth: seed.bandwidth,
        alpha0: settings.schedule.alpha0,
        lr: settings.lr,
        best: None,
        h_hard: None,
        best_step: None,
        steps_run: 0,
        error: None,
    };
    match optimize_with(objective, &init, &settings) {
        Ok(out) => {
            summary.best = Some(out.best);
            summary.h_hard = Some(out.best_h_hard);
            summary.best_step = Some(out.best_step);
            summary.steps_run = out.trace.steps.len();
            Ok(RestartOutcome {
                summary,
                trace: Some(out.trace),
            })
        }
        Err(Error::NonFiniteGradient { step, trace }) => {
            summary.steps_run = trace.steps.len();
            summary.error = Some(format!("non-finite gradient at step {step}"));
            Ok(RestartOutcome {
                summary,
                trace: Some(*trace),
            })
        }
        Err(e) => Err(e),
    }
}

fn run(dataset: &Dataset, labels: &RewardAlphabet, config: &DiscoveryConfig) -> Result<Discovery> {
    if config.m == 0 || config.n_restart == 0 {
        return Err(Error::InvalidParameter(
            "m and n_restart must be at least 1".into(),
        ));
    }
    if labels.len() != dataset.len() {
        return Err(Error::InvalidParameter(format!(
            "{} labels for {} trajectories",
            labels.len(),
            dataset.len()
        )));
    }
    let h_r = marginal_entropy(labels);
    if h_r <= 0.0 {
        return Err(Error::DegenerateLabels);
    }
    let bounds = dataset.radius_bounds();
    let floor_region = Region {
        center: dataset.centroid(),
        radius: bounds.max,
    };

    let mut regions: Vec<Region> = Vec::new();
    let mut stages = Vec::new();
    let mut traces = Vec::new();
    let mut h_prev = h_r;
    let mut early_stop = false;

    for stage in 1..=config.m {
        let objective =
            Objective::new(dataset, labels, &regions)?.deterministic(config.deterministic);
        let outcomes: Vec<Result<RestartOutcome>> = (0..config.n_restart)
            .into_par_iter()
            .map(|j| run_restart(&objective, labels, &regions, config, stage, j))
            .collect();
        let outcomes = outcomes
            .into_iter()
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Stage {
                stage,
                source: Box::new(e),
            })?;

        let floor_h = objective.hard_entropy(&floor_region)?;
        let mut chosen: Option<usize> = None;
        let mut best_h = floor_h;
        let mut best_region = floor_region.clone();
        for o in &outcomes {
            if let (Some(h), Some(r)) = (o.summary.h_hard, &o.summary.best) {
                // restarts precede the floor, so an equal restart wins
                if chosen.is_none() && h <= best_h || chosen.is_some() && h < best_h {
                    best_h = h;
                    best_region = r.clone();
                    chosen = Some(o.summary.restart);
                }
            }
        }
        let ig = h_prev - best_h;
        let accepted = config.ig_floor.is_none_or(|f| ig >= f);
        let (summaries, stage_traces): (Vec<_>, Vec<_>) =
            outcomes.into_iter().map(|o| (o.summary, o.trace)).unzip();
        traces.push(stage_traces);
        stages.push(StageReport {
            stage,
            h_before: h_prev,
            h_after: if accepted { best_h } else { h_prev },
            ig,
            ig_bits: to_bits(ig),
            cumulative_ig: h_r - best_h,
            region: best_region.clone(),
            chosen_restart: chosen,
            floor_h_hard: floor_h,
            restarts: summaries,
            accepted,
        });
        if !accepted {
            early_stop = true;
            break;
        }
        regions.push(best_region);
        h_prev = best_h;
    }

    let final_ig = h_r - h_prev;
    let report = DiscoveryReport {
        schema_version: REPORT_SCHEMA_VERSION,
        seed: config.seed,
        reward_values: labels.values.clone(),
        reward_counts: labels.counts(),
        reward_entropy: h_r,
        reward_entropy_bits: to_bits(h_r),
        regions,
        stages,
        final_entropy: h_prev,
        final_ig,
        early_stop,
        early_stop_is_extension: config.ig_floor.is_some(),
        no_structure: final_ig <= config.no_structure_threshold,
        success_labels: config
            .init
            .success_labels
            .clone()
            .unwrap_or_else(|| labels.default_success_labels()),
        config: config.clone(),
        meta: Default::default(),
    };
    Ok(Discovery { report, traces })
}

/// Discover up to `config.m` regions, keeping every restart's trace.
pub fn discover_with_traces(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    config: &DiscoveryConfig,
) -> Result<Discovery> {
    if config.jobs == 0 {
        return run(dataset, labels, config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run(dataset, labels, config))
}

/// Discover up to `config.m` regions.
pub fn discover(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    config: &DiscoveryConfig,
) -> Result<DiscoveryReport> {
    discover_with_traces(dataset, labels, config).map(|d| d.report)
}
