//! Discrete reward alphabets, with 1-D k-means for continuous rewards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered reward values `r_1 < … < r_K` and each trajectory's label index.
///
/// `labels` is aligned with the trajectory order of the dataset it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardAlphabet {
    pub values: Vec<f64>,
    pub labels: Vec<usize>,
}

impl RewardAlphabet {
    pub fn new(values: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("reward alphabet is empty".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidParameter("no labels".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&k| k >= values.len()) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} outside alphabet of size {}",
                values.len()
            )));
        }
        Ok(RewardAlphabet { values, labels })
    }

    /// Build directly from integer labels in `0..k`.
    pub fn from_labels(labels: Vec<usize>, k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| i as f64).collect(), labels)
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, l: usize) -> usize {
        self.labels[l]
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.k()];
        for &k in &self.labels {
            c[k] += 1;
        }
        c
    }

    /// Index of the most frequent label; ties go to the lowest index.
    pub fn majority(&self) -> usize {
        let counts = self.counts();
        let mut best = 0;
        for (k, &c) in counts.iter().enumerate() {
            if c > counts[best] {
                best = k;
            }
        }
        best
    }

    /// Every label except the most frequent one.
    pub fn default_success_labels(&self) -> Vec<usize> {
        if self.k() == 1 {
            return vec![0];
        }
        let maj = self.majority();
        (0..self.k()).filter(|&k| k != maj).collect()
    }
}

fn sorted_distinct(values: &[f64]) -> Vec<f64> {
    let mut d = values.to_vec();
    d.sort_by(f64::total_cmp);
    d.dedup();
    d
}

fn nearest(centers: &[f64], x: f64) -> usize {
    // lowest index wins ties, which keeps labels monotone in x
    let mut best = 0;
    let mut bd = f64::INFINITY;
    for (i, &c) in centers.iter().enumerate() {
        let d = (x - c).abs();
        if d < bd {
            bd = d;
            best = i;
        }
    }
    best
}

/// Cluster rewards into `k` labels with deterministic 1-D k-means.
///
/// Centers start at evenly spaced quantiles of the sorted distinct values.
/// Inputs with exactly `k` distinct values keep their values as the alphabet.
pub fn discretize_rewards(rewards: &[f64], k: usize) -> Result<RewardAlphabet> {
    if rewards.is_empty() {
        return Err(Error::InvalidParameter("no rewards to discretize".into()));
    }
    if rewards.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidParameter("non-finite reward".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter(
            "cluster count must be at least 1".into(),
        ));
    }
    let distinct = sorted_distinct(rewards);
    if k > distinct.len() {
        return Err(Error::InvalidParameter(format!(
            "{k} reward clusters requested but only {} distinct reward values",
            distinct.len()
        )));
    }
    if k == distinct.len() {
        let labels = rewards
            .iter()
            .map(|r| {
                distinct
                    .binary_search_by(|v| v.total_cmp(r))
                    .expect("value present")
            })
            .collect();
        return RewardAlphabet::new(distinct, labels);
    }

    let n = distinct.len();
    let mut centers: Vec<f64> = if k == 1 {
        vec![distinct[(n - 1) / 2]]
    } else {
        (0..k)
            .map(|i| distinct[((i * (n - 1)) as f64 / (k - 1) as f64).round() as usize])
            .collect()
    };

    // Lloyd iterations over the (sorted) sample; clusters stay contiguous in 1-D.
    let mut sorted = rewards.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut assign: Vec<usize> = sorted.iter().map(|&x| nearest(&centers, x)).collect();
    for _ in 0..1000 {
        let mut sum = vec![0.0; k];
        let mut cnt = vec![0usize; k];
        for (&x, &a) in sorted.iter().zip(&assign) {
            sum[a] += x;
            cnt[a] += 1;
        }
        for j in 0..k {
            if cnt[j] > 0 {
                centers[j] = sum[j] / cnt[j] as f64;
            }
        }
        let next: Vec<usize> = sorted.iter().map(|&x| nearest(&centers, x)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }

    // drop clusters that ended up empty and renumber in ascending center order
    let mut used: Vec<usize> = assign.clone();
    used.sort_unstable();
    used.dedup();
    let mut kept: Vec<(f64, usize)> = used.iter().map(|&j| (centers[j], j)).collect();
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    let final_centers: Vec<f64> = kept.iter().map(|c| c.0).collect();
    let labels = rewards
        .iter()
        .map(|&r| nearest(&final_centers, r))
        .collect();
    RewardAlphabet::new(final_centers, labels)
}
