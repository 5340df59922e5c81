//! Gaussian kernel density seeding of region centers.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::RewardAlphabet;
use crate::rng;
use crate::trajectory::{sq_dist, Dataset, Region};

/// Kernel bandwidth: explicit, or Scott's rule on the success states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    Auto,
    Fixed(f64),
}

impl std::fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bandwidth::Auto => write!(f, "auto"),
            Bandwidth::Fixed(b) => write!(f, "{b}"),
        }
    }
}

impl std::str::FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Bandwidth::Auto);
        }
        let b: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad bandwidth `{s}`")))?;
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {b}"
            )));
        }
        Ok(Bandwidth::Fixed(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitConfig {
    pub n_samples: usize,
    pub bandwidth: Bandwidth,
    /// Label indices counted as success; `None` means every label except the
    /// most frequent.
    pub success_labels: Option<Vec<usize>>,
    /// Draw candidates with probability proportional to density instead of uniformly.
    pub weighted_sampling: bool,
    pub seed: u64,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig {
            n_samples: 256,
            bandwidth: Bandwidth::Auto,
            success_labels: None,
            weighted_sampling: false,
            seed: 0,
        }
    }
}

/// Gaussian KDE with an isotropic scalar bandwidth.
#[derive(Debug, Clone)]
pub struct GaussianKde {
    points: Vec<Vec<f64>>,
    bandwidth: f64,
    norm: f64,
}

impl GaussianKde {
    pub fn new(points: Vec<Vec<f64>>, bandwidth: f64) -> Result<Self> {
        let d = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameter("KDE needs at least one point".into()))?;
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidParameter(
                "KDE points differ in dimension".into(),
            ));
        }
        let n = points.len() as f64;
        let norm = 1.0
            / (n * (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0) * bandwidth.powi(d as i32));
        Ok(GaussianKde {
            points,
            bandwidth,
            norm,
        })
    }

    /// Build with Scott's rule `N^(−1/(d+4)) · σ̂`, σ̂ the mean per-dimension
    /// standard deviation.
    pub fn with_scott(points: Vec<Vec<f64>>) -> Result<Self> {
        let b = scott_bandwidth(&points)?;
        Self::new(points, b)
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn density(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "query has dimension {}, KDE has {}",
                query.len(),
                self.dim()
            )));
        }
        Ok(self.density_unchecked(query))
    }

    fn density_unchecked(&self, query: &[f64]) -> f64 {
        let s = -0.5 / (self.bandwidth * self.bandwidth);
        self.norm
            * self
                .points
                .iter()
                .map(|p| (s * sq_dist(p, query)).exp())
                .sum::<f64>()
    }
}

pub fn scott_bandwidth(points: &[Vec<f64>]) -> Result<f64> {
    let n = points.len();
    let d = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidParameter("KDE needs at least one point".into()))?;
    let mut sigma = 0.0;
    if n > 1 {
        for j in 0..d {
            let mean = points.iter().map(|p| p[j]).sum::<f64>() / n as f64;
            let var = points.iter().map(|p| (p[j] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            sigma += var.sqrt();
        }
        sigma /= d as f64;
    }
    if sigma <= 0.0 {
        // all points coincide; any positive width ranks them identically
        return Ok(1.0);
    }
    Ok((n as f64).powf(-1.0 / (d as f64 + 4.0)) * sigma)
}

/// `(1 / (N (2π)^{d/2} bᵈ)) Σ exp(−‖q − p‖² / 2b²)`.
pub fn kde_density(points: &[Vec<f64>], bandwidth: f64, query: &[f64]) -> Result<f64> {
    GaussianKde::new(points.to_vec(), bandwidth)?.density(query)
}

/// A ranked seeding candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub state: Vec<f64>,
    pub density: f64,
    pub trajectory: usize,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub center: Vec<f64>,
    /// Drawn candidates, highest density first.
    pub candidates: Vec<Candidate>,
    pub bandwidth: f64,
}

/// Pick an initial region center among states of successful trajectories.
///
/// States inside any `found` region are removed from the candidate pool, but
/// density is still measured against every success state.
pub fn sample_center(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    found: &[Region],
    cfg: &InitConfig,
) -> Result<Seed> {
    if cfg.n_samples == 0 {
        return Err(Error::InvalidParameter(
            "init.n_samples must be at least 1".into(),
        ));
    }
    if labels.len() != dataset.len() {
        return Err(Error::InvalidParameter(format!(
            "{} labels for {} trajectories",
            labels.len(),
            dataset.len()
        )));
    }
    for r in found {
        dataset.check_center(&r.center)?;
    }
    let success = match &cfg.success_labels {
        Some(s) => s.clone(),
        None => labels.default_success_labels(),
    };
    let mut evidence = Vec::new();
    let mut pool = Vec::new();
    for (l, t) in dataset.trajectories().iter().enumerate() {
        if !success.contains(&labels.label(l)) {
            continue;
        }
        for (h, s) in t.states.iter().enumerate() {
            evidence.push(s.0.clone());
            if !found.iter().any(|r| r.contains(s.coords())) {
                pool.push((l, h));
            }
        }
    }
    if evidence.is_empty() {
        return Err(Error::NoSuccessSet);
    }
    if pool.is_empty() {
        return Err(Error::PoolExhausted);
    }
    let kde = match cfg.bandwidth {
        Bandwidth::Auto => GaussianKde::with_scott(evidence)?,
        Bandwidth::Fixed(b) => GaussianKde::new(evidence, b)?,
    };
    let state_of = |&(l, h): &(usize, usize)| dataset.trajectories()[l].states[h].coords();

    let mut rng = rng::stream(cfg.seed, "kde-sample", &[]);
    let amount = cfg.n_samples.min(pool.len());
    let drawn: Vec<usize> = if amount == pool.len() {
        (0..pool.len()).collect()
    } else if cfg.weighted_sampling {
        let dens: Vec<f64> = pool
            .par_iter()
            .map(|p| kde.density_unchecked(state_of(p)).max(f64::MIN_POSITIVE))
            .collect();
        index::sample_weighted(&mut rng, pool.len(), |i| dens[i], amount)
            .map_err(|e| Error::InvalidParameter(format!("weighted sampling failed: {e}")))?
            .into_vec()
    } else {
        index::sample(&mut rng, pool.len(), amount).into_vec()
    };
    let mut drawn = drawn;
    drawn.sort_unstable();

    let mut candidates: Vec<(usize, Candidate)> = drawn
        .par_iter()
        .map(|&i| {
            let (l, h) = pool[i];
            let z = state_of(&pool[i]);
            (
                i,
                Candidate {
                    state: z.to_vec(),
                    density: kde.density_unchecked(z),
                    trajectory: l,
                    step: h,
                },
            )
        })
        .collect();
    candidates.sort_by(|a, b| b.1.density.total_cmp(&a.1.density).then(a.0.cmp(&b.0)));
    let candidates: Vec<Candidate> = candidates.into_iter().map(|c| c.1).collect();
    Ok(Seed {
        center: candidates[0].state.clone(),
        candidates,
        bandwidth: kde.bandwidth(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::Trajectory;

    #[test]
    fn kernel_peak() {
        let d = kde_density(&[vec![0.3]], 1.0, &[0.3]).unwrap();
        assert!((d - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!((d - 0.3989).abs() < 1e-4);
    }

    #[test]
    fn density_falls_off_from_symmetric_centroid() {
        let pts = vec![
            vec![-1.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, -1.0],
            vec![0.0, 1.0],
        ];
        let at_center = kde_density(&pts, 0.8, &[0.0, 0.0]).unwrap();
        let away = kde_density(&pts, 0.8, &[2.5, 1.0]).unwrap();
        assert!(away < at_center);
    }

    #[test]
    fn density_errors() {
        assert!(kde_density(&[], 1.0, &[0.0]).is_err());
        assert!(kde_density(&[vec![0.0]], 0.0, &[0.0]).is_err());
        assert!(kde_density(&[vec![0.0]], 1.0, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn bandwidth_parse() {
        assert_eq!("auto".parse::<Bandwidth>().unwrap(), Bandwidth::Auto);
        assert_eq!("0.5".parse::<Bandwidth>().unwrap(), Bandwidth::Fixed(0.5));
        assert!("-1".parse::<Bandwidth>().is_err());
    }

    fn ds(rows: Vec<(Vec<Vec<f64>>, f64)>) -> (Dataset, RewardAlphabet) {
        let trajs: Vec<Trajectory> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (r, w))| Trajectory::from_rows(format!("t{i}"), r, w).unwrap())
            .collect();
        let ds = Dataset::new(trajs).unwrap();
        let labels = crate::reward::discretize_rewards(&ds.rewards(), 2).unwrap();
        (ds, labels)
    }

    #[test]
    fn single_success_trajectory_seeds_on_its_states() {
        let success = vec![vec![0.1, 0.1], vec![0.2, 0.1], vec![0.3, 0.2]];
        let (ds, lab) = ds(vec![
            (success.clone(), 1.0),
            (vec![vec![0.9, 0.9]], 0.0),
            (vec![vec![0.8, 0.9]], 0.0),
        ]);
        let seed = sample_center(&ds, &lab, &[], &InitConfig::default()).unwrap();
        assert!(success.contains(&seed.center));
        assert_eq!(seed.candidates.len(), 3);
        // middle state is closest to the other two
        assert_eq!(seed.center, vec![0.2, 0.1]);
    }

    #[test]
    fn no_success_and_exhausted_pool() {
        let (ds, _) = ds(vec![
            (vec![vec![0.0, 0.0]], 1.0),
            (vec![vec![1.0, 1.0]], 0.0),
        ]);
        let lab = RewardAlphabet::from_labels(vec![0, 0], 2).unwrap();
        let cfg = InitConfig {
            success_labels: Some(vec![1]),
            ..InitConfig::default()
        };
        assert!(matches!(
            sample_center(&ds, &lab, &[], &cfg),
            Err(Error::NoSuccessSet)
        ));

        let lab = RewardAlphabet::from_labels(vec![1, 0], 2).unwrap();
        let cover = Region::new(vec![0.0, 0.0], 0.5).unwrap();
        assert!(matches!(
            sample_center(&ds, &lab, &[cover], &InitConfig::default()),
            Err(Error::PoolExhausted)
        ));
    }
}
