//! Flat `key = value` run configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! seed = 7
//! reward_clusters = 2
//! init.bandwidth = auto
//! init.success_labels = 1,2
//! opt.alpha0 = auto
//! ```
//!
//! Blank lines and `#` comments are ignored. Keys are case-sensitive and
//! unknown keys are rejected. Numeric `opt.*` keys with data-dependent
//! defaults accept `auto`. Command-line flags override the file, and the
//! file overrides built-in defaults.

use std::path::Path;
use std::str::FromStr;

use crate::discovery::DiscoveryConfig;
use crate::error::{Error, Result};

/// Everything `discover` needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub discovery: DiscoveryConfig,
    pub reward_clusters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            discovery: DiscoveryConfig::default(),
            reward_clusters: 2,
        }
    }
}

pub const KEYS: &[&str] = &[
    "seed",
    "m",
    "restarts",
    "reward_clusters",
    "deterministic",
    "jobs",
    "ig_floor",
    "no_structure_threshold",
    "init.n_samples",
    "init.bandwidth",
    "init.success_labels",
    "init.weighted_sampling",
    "opt.lr",
    "opt.max_steps",
    "opt.tol",
    "opt.alpha0",
    "opt.growth",
    "opt.period",
    "opt.alpha_max",
    "opt.momentum",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value `{value}` for `{key}`")))
}

fn parse_auto<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl RunConfig {
    /// Set one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let d = &mut self.discovery;
        let value = value.trim();
        match key {
            "seed" => d.seed = parse(key, value)?,
            "m" => d.m = parse(key, value)?,
            "restarts" => d.n_restart = parse(key, value)?,
            "reward_clusters" => self.reward_clusters = parse(key, value)?,
            "deterministic" => d.deterministic = parse(key, value)?,
            "jobs" => d.jobs = parse(key, value)?,
            "ig_floor" => {
                d.ig_floor = if value.eq_ignore_ascii_case("off") {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "no_structure_threshold" => d.no_structure_threshold = parse(key, value)?,
            "init.n_samples" => d.init.n_samples = parse(key, value)?,
            "init.bandwidth" => d.init.bandwidth = value.parse()?,
            "init.success_labels" => {
                d.init.success_labels = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(
                        value
                            .split(',')
                            .map(|v| parse::<usize>(key, v.trim()))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
            }
            "init.weighted_sampling" => d.init.weighted_sampling = parse(key, value)?,
            "opt.lr" => d.opt.lr = parse_auto(key, value)?,
            "opt.max_steps" => d.opt.max_steps = parse(key, value)?,
            "opt.tol" => d.opt.tol = parse(key, value)?,
            "opt.alpha0" => d.opt.alpha0 = parse_auto(key, value)?,
            "opt.growth" => d.opt.growth = parse(key, value)?,
            "opt.period" => d.opt.period = parse_auto(key, value)?,
            "opt.alpha_max" => d.opt.alpha_max = parse_auto(key, value)?,
            "opt.momentum" => d.opt.momentum = parse(key, value)?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown config key `{other}`"
                )))
            }
        }
        Ok(())
    }

    /// Apply a config document on top of `self`.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Schema {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value).map_err(|e| Error::Schema {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_str(&text)
    }

    /// Render every key with its effective value, in the config grammar.
    pub fn render(&self) -> String {
        let d = &self.discovery;
        let auto = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), |x| x.to_string());
        let mut lines = vec![
            format!("seed = {}", d.seed),
            format!("m = {}", d.m),
            format!("restarts = {}", d.n_restart),
            format!("reward_clusters = {}", self.reward_clusters),
            format!("deterministic = {}", d.deterministic),
            format!(
                "ig_floor = {}",
                d.ig_floor
                    .map_or_else(|| "off".to_string(), |x| x.to_string())
            ),
            format!("no_structure_threshold = {}", d.no_structure_threshold),
            format!("init.n_samples = {}", d.init.n_samples),
            format!("init.bandwidth = {}", d.init.bandwidth),
            format!(
                "init.success_labels = {}",
                d.init.success_labels.as_ref().map_or_else(
                    || "auto".to_string(),
                    |v| v
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            ),
            format!("init.weighted_sampling = {}", d.init.weighted_sampling),
            format!("opt.lr = {}", auto(d.opt.lr)),
            format!("opt.max_steps = {}", d.opt.max_steps),
            format!("opt.tol = {}", d.opt.tol),
            format!("opt.alpha0 = {}", auto(d.opt.alpha0)),
            format!("opt.growth = {}", d.opt.growth),
            format!(
                "opt.period = {}",
                d.opt
                    .period
                    .map_or_else(|| "auto".to_string(), |x| x.to_string())
            ),
            format!("opt.alpha_max = {}", auto(d.opt.alpha_max)),
            format!("opt.momentum = {}", d.opt.momentum),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}
