use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trajregions::config::RunConfig;
use trajregions::corpus::{load_corpus, save_corpus};
use trajregions::discovery::{discover_with_traces, DiscoveryReport};
use trajregions::eval::{evaluate, points_csv, regions_csv};
use trajregions::oracle::{default_centers, geometric_radii, grid_search};
use trajregions::reward::{discretize_rewards, RewardAlphabet};
use trajregions::synth::{generate, TaskKind, TaskSpec, Truth};
use trajregions::trajectory::Dataset;
use trajregions::{Error, Result};

#[derive(Parser)]
#[command(
    name = "trajregions",
    version,
    about = "Find the regions of state space that explain trajectory rewards"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted-truth corpus and its truth sidecar.
    Gen {
        /// Scenario: paint, door or null
        #[arg(long, default_value = "paint")]
        task: TaskKind,
        /// State-space dimension
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of trajectories
        #[arg(long)]
        traj: Option<usize>,
        /// States per trajectory
        #[arg(long)]
        horizon: Option<usize>,
        /// Random-walk step scale
        #[arg(long)]
        step: Option<f64>,
        /// Probability of flipping each reward
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corpus path (line-delimited JSON)
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out stem>.truth.json`.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Discover regions and write a JSON report.
    Discover {
        /// Corpus path
        #[arg(long)]
        data: PathBuf,
        /// Key/value config file, applied before flags
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of regions
        #[arg(long)]
        m: Option<usize>,
        /// Optimizer restarts per stage
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Reward alphabet size
        #[arg(long = "reward-clusters")]
        reward_clusters: Option<usize>,
        /// Stop once a stage gains less than this (nats)
        #[arg(long = "ig-floor")]
        ig_floor: Option<f64>,
        /// Worker threads; 0 uses every core
        #[arg(long)]
        jobs: Option<usize>,
        /// `true` fixes every summation order.
        #[arg(long)]
        deterministic: Option<bool>,
        /// Extra `key=value` overrides, repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Report path
        #[arg(long)]
        out: PathBuf,
        /// Directory for per-restart optimizer traces as CSV.
        #[arg(long = "trace-dir")]
        trace_dir: Option<PathBuf>,
    },
    /// Exhaustive grid search over visited states × geometric radii.
    Oracle {
        /// Corpus path
        #[arg(long)]
        data: PathBuf,
        /// Treat the regions of this report as frozen.
        #[arg(long)]
        frozen: Option<PathBuf>,
        /// Geometric radii per center
        #[arg(long, default_value_t = 32)]
        radii: usize,
        /// Reward alphabet size
        #[arg(long = "reward-clusters", default_value_t = 2)]
        reward_clusters: usize,
        /// Per-candidate entropy table (CSV)
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a report against a truth sidecar.
    Eval {
        /// Discovery report
        #[arg(long)]
        report: PathBuf,
        /// Truth sidecar written by `gen`
        #[arg(long)]
        truth: PathBuf,
        /// Defaults to the corpus recorded in the report.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Also write the summary here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a report as a table and export plot-ready CSV.
    Report {
        /// Discovery report
        #[arg(long)]
        report: PathBuf,
        /// Corpus path; defaults to the one recorded in the report
        #[arg(long)]
        data: Option<PathBuf>,
        /// Write every state with its trajectory reward
        #[arg(long)]
        points: Option<PathBuf>,
        /// Write region centers and radii
        #[arg(long)]
        regions: Option<PathBuf>,
    },
}

fn labels_for(data: &Dataset, k: usize) -> Result<RewardAlphabet> {
    let rewards = data.rewards();
    let mut distinct = rewards.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    // constant rewards surface as degenerate labels, not as a clustering error
    discretize_rewards(&rewards, if distinct.len() == 1 { 1 } else { k })
}

fn read_report(path: &Path) -> Result<DiscoveryReport> {
    DiscoveryReport::from_json(&std::fs::read_to_string(path)?)
}

fn report_data(report: &DiscoveryReport, data: Option<PathBuf>) -> Result<PathBuf> {
    data.or_else(|| report.meta.get("data").map(PathBuf::from))
        .ok_or_else(|| {
            Error::InvalidParameter("no corpus given and none recorded in the report".into())
        })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            task,
            dim,
            traj,
            horizon,
            step,
            noise,
            seed,
            out,
            truth,
        } => {
            let mut spec = TaskSpec::for_kind(task, dim, seed);
            if let Some(n) = traj {
                spec.n_traj = n;
            }
            if let Some(h) = horizon {
                spec.horizon = h;
            }
            if let Some(s) = step {
                spec.step_scale = s;
            }
            spec.label_noise = noise;
            let (dataset, truth_doc) = generate(&spec)?;
            save_corpus(&dataset, &out)?;
            let truth_path = truth.unwrap_or_else(|| out.with_extension("truth.json"));
            std::fs::write(
                &truth_path,
                serde_json::to_string_pretty(&truth_doc)? + "\n",
            )?;
            println!(
                "wrote {} trajectories to {} (success fraction {:.3}), truth to {}",
                dataset.len(),
                out.display(),
                truth_doc.success_fraction,
                truth_path.display()
            );
        }
        Command::Discover {
            data,
            config,
            m,
            restarts,
            seed,
            reward_clusters,
            ig_floor,
            jobs,
            deterministic,
            set,
            out,
            trace_dir,
        } => {
            let mut cfg = RunConfig::default();
            if let Some(path) = &config {
                cfg.apply_file(path)?;
            }
            for kv in &set {
                let (k, v) = kv.split_once('=').ok_or_else(|| {
                    Error::InvalidParameter(format!("--set expects KEY=VALUE, got `{kv}`"))
                })?;
                cfg.set(k.trim(), v)?;
            }
            let d = &mut cfg.discovery;
            if let Some(v) = m {
                d.m = v;
            }
            if let Some(v) = restarts {
                d.n_restart = v;
            }
            if let Some(v) = seed {
                d.seed = v;
            }
            if let Some(v) = ig_floor {
                d.ig_floor = Some(v);
            }
            if let Some(v) = jobs {
                d.jobs = v;
            }
            if let Some(v) = deterministic {
                d.deterministic = v;
            }
            if let Some(k) = reward_clusters {
                cfg.reward_clusters = k;
            }
            let dataset = load_corpus(&data)?;
            let labels = labels_for(&dataset, cfg.reward_clusters)?;
            let result = discover_with_traces(&dataset, &labels, &cfg.discovery)?;
            let mut report = result.report;
            report
                .meta
                .insert("data".into(), data.display().to_string());
            report
                .meta
                .insert("reward_clusters".into(), cfg.reward_clusters.to_string());
            report.meta.insert("effective_config".into(), cfg.render());
            std::fs::write(&out, report.to_json()?)?;
            if let Some(dir) = trace_dir {
                std::fs::create_dir_all(&dir)?;
                for (i, stage) in result.traces.iter().enumerate() {
                    for (j, trace) in stage.iter().enumerate() {
                        if let Some(t) = trace {
                            std::fs::write(
                                dir.join(format!("stage{}_restart{}.csv", i + 1, j)),
                                t.to_csv(),
                            )?;
                        }
                    }
                }
            }
            print!("{}", report.table());
        }
        Command::Oracle {
            data,
            frozen,
            radii,
            reward_clusters,
            out,
        } => {
            let dataset = load_corpus(&data)?;
            let labels = labels_for(&dataset, reward_clusters)?;
            let frozen = match frozen {
                Some(p) => read_report(&p)?.regions,
                None => vec![],
            };
            let res = grid_search(
                &dataset,
                &labels,
                &frozen,
                &default_centers(&dataset),
                &geometric_radii(dataset.radius_bounds(), radii),
            )?;
            std::fs::write(&out, res.table.to_csv())?;
            println!(
                "best H_hard = {:.6} nats at center {:?}, radius {:.6}",
                res.h_hard, res.best.center, res.best.radius
            );
        }
        Command::Eval {
            report,
            truth,
            data,
            out,
        } => {
            let rep = read_report(&report)?;
            let truth: Truth = serde_json::from_str(&std::fs::read_to_string(&truth)?)?;
            let dataset = load_corpus(report_data(&rep, data)?)?;
            let k = rep
                .meta
                .get("reward_clusters")
                .and_then(|v| v.parse().ok())
                .unwrap_or(rep.reward_values.len());
            let labels = labels_for(&dataset, k)?;
            let summary = evaluate(&dataset, &labels, &rep.regions, Some(&truth))?;
            let text = serde_json::to_string_pretty(&summary)? + "\n";
            match out {
                Some(p) => std::fs::write(p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Report {
            report,
            data,
            points,
            regions,
        } => {
            let rep = read_report(&report)?;
            print!("{}", rep.table());
            let dim = rep
                .regions
                .first()
                .or(rep.stages.first().map(|s| &s.region))
                .map_or(0, |r| r.center.len());
            if let Some(p) = regions {
                std::fs::write(p, regions_csv(dim, &rep.regions))?;
            }
            if let Some(p) = points {
                let dataset = load_corpus(report_data(&rep, data)?)?;
                std::fs::write(p, points_csv(&dataset))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "error code={} exit={} message={}",
                e.code(),
                e.exit_code(),
                serde_json::to_string(&e.to_string()).unwrap_or_default()
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
