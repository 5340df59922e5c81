//! Scoring found regions against labels or planted truth, and plot-ready CSV.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::entropy::{conditional_entropy, estimate_joint, marginal_entropy, MembershipMatrix};
use crate::error::Result;
use crate::reward::RewardAlphabet;
use crate::synth::Truth;
use crate::trajectory::{sq_dist, Dataset, Region};

fn patterns(dataset: &Dataset, regions: &[Region]) -> Result<Vec<usize>> {
    let mm = MembershipMatrix::hard(dataset, regions)?;
    Ok((0..dataset.len())
        .map(|l| {
            mm.row(l).iter().enumerate().fold(
                0usize,
                |acc, (j, &v)| if v > 0.5 { acc | 1 << j } else { acc },
            )
        })
        .collect())
}

/// Label predicted for each trajectory by the majority label of its
/// membership pattern; ties go to the lowest label index.
pub fn pattern_predictions(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    regions: &[Region],
) -> Result<Vec<usize>> {
    let pats = patterns(dataset, regions)?;
    let mut counts: HashMap<usize, Vec<usize>> = HashMap::new();
    for (l, &p) in pats.iter().enumerate() {
        counts.entry(p).or_insert_with(|| vec![0; labels.k()])[labels.label(l)] += 1;
    }
    let majority: HashMap<usize, usize> = counts
        .into_iter()
        .map(|(p, c)| {
            let mut best = 0;
            for (k, &n) in c.iter().enumerate() {
                if n > c[best] {
                    best = k;
                }
            }
            (p, best)
        })
        .collect();
    Ok(pats.iter().map(|p| majority[p]).collect())
}

/// Fraction of trajectories whose label matches its pattern's majority label.
pub fn pattern_accuracy(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    regions: &[Region],
) -> Result<f64> {
    let pred = pattern_predictions(dataset, labels, regions)?;
    let hits = pred
        .iter()
        .zip(&labels.labels)
        .filter(|(a, b)| a == b)
        .count();
    Ok(hits as f64 / dataset.len() as f64)
}

/// Hard `H(R | M¹…Mᵐ)` for a set of regions.
pub fn hard_conditional_entropy(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    regions: &[Region],
) -> Result<f64> {
    let mm = MembershipMatrix::hard(dataset, regions)?;
    Ok(conditional_entropy(&estimate_joint(&mm, labels)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub n_regions: usize,
    pub reward_entropy: f64,
    pub hard_entropy: f64,
    pub information_gain: f64,
    /// Majority-label-per-pattern accuracy against the corpus labels.
    pub accuracy: f64,
    /// Agreement of the found regions' predictions with noise-free planted rewards.
    pub truth_agreement: Option<f64>,
    /// Hard entropy achieved by the planted regions themselves.
    pub truth_entropy: Option<f64>,
    /// For each planted region, distance from its center to the nearest found center.
    pub center_errors: Vec<f64>,
}

pub fn evaluate(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    regions: &[Region],
    truth: Option<&Truth>,
) -> Result<EvalSummary> {
    let reward_entropy = marginal_entropy(labels);
    let hard_entropy = hard_conditional_entropy(dataset, labels, regions)?;
    let accuracy = pattern_accuracy(dataset, labels, regions)?;
    let mut summary = EvalSummary {
        n_regions: regions.len(),
        reward_entropy,
        hard_entropy,
        information_gain: reward_entropy - hard_entropy,
        accuracy,
        truth_agreement: None,
        truth_entropy: None,
        center_errors: vec![],
    };
    if let Some(truth) = truth {
        let pred = pattern_predictions(dataset, labels, regions)?;
        let clean: Option<Vec<f64>> = dataset
            .trajectories()
            .iter()
            .map(|t| truth.clean_reward(t))
            .collect();
        if let Some(clean) = clean {
            let agree = pred
                .iter()
                .zip(&clean)
                .filter(|(&p, &c)| (labels.values[p] - c).abs() < 0.5)
                .count();
            summary.truth_agreement = Some(agree as f64 / dataset.len() as f64);
        }
        if !truth.regions.is_empty() {
            summary.truth_entropy =
                Some(hard_conditional_entropy(dataset, labels, &truth.regions)?);
        }
        summary.center_errors = truth
            .regions
            .iter()
            .map(|t| {
                regions
                    .iter()
                    .map(|r| sq_dist(&r.center, &t.center).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
    }
    Ok(summary)
}

/// Every state tagged with its trajectory's reward: `x1..xd,reward`.
pub fn points_csv(dataset: &Dataset) -> String {
    let mut out = (1..=dataset.dim())
        .map(|j| format!("x{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push_str(",reward\n");
    for t in dataset.trajectories() {
        for s in &t.states {
            for v in s.coords() {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{}\n", t.reward));
        }
    }
    out
}

/// Found regions as circles: `cx1..cxd,radius,stage` (stage is 1-based).
pub fn regions_csv(dim: usize, regions: &[Region]) -> String {
    let mut out = (1..=dim)
        .map(|j| format!("cx{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push_str(",radius,stage\n");
    for (i, r) in regions.iter().enumerate() {
        for v in &r.center {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{},{}\n", r.radius, i + 1));
    }
    out
}
