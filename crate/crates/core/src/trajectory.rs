//! Trajectories, datasets, spherical regions, and region membership.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent bound applied inside the sigmoid.
pub const EXP_CLAMP: f64 = 500.0;

/// One observable state in ℝᵈ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(pub Vec<f64>);

impl State {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for State {
    fn from(v: Vec<f64>) -> Self {
        State(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: String,
    pub states: Vec<State>,
    /// Carried through for fidelity with the recorded data; never interpreted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<serde_json::Value>>,
    pub reward: f64,
}

impl Trajectory {
    pub fn new(id: impl Into<String>, states: Vec<State>, reward: f64) -> Result<Self> {
        let t = Trajectory {
            id: id.into(),
            states,
            actions: None,
            reward,
        };
        t.validate()?;
        Ok(t)
    }

    /// Build from plain coordinate rows.
    pub fn from_rows(id: impl Into<String>, rows: Vec<Vec<f64>>, reward: f64) -> Result<Self> {
        Self::new(id, rows.into_iter().map(State).collect(), reward)
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidDataset(format!(
                "trajectory `{}` has no states",
                self.id
            )));
        }
        if !self.reward.is_finite() {
            return Err(Error::InvalidDataset(format!(
                "trajectory `{}` has a non-finite reward",
                self.id
            )));
        }
        let d = self.states[0].dim();
        if d == 0 {
            return Err(Error::InvalidDataset(format!(
                "trajectory `{}` has zero-dimensional states",
                self.id
            )));
        }
        for s in &self.states {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    id: self.id.clone(),
                    expected: d,
                    found: s.dim(),
                });
            }
            if !s.is_finite() {
                return Err(Error::InvalidDataset(format!(
                    "trajectory `{}` has a non-finite coordinate",
                    self.id
                )));
            }
        }
        if let Some(actions) = &self.actions {
            let n = self.states.len();
            if actions.len() != n && actions.len() + 1 != n {
                return Err(Error::InvalidDataset(format!(
                    "trajectory `{}` has {} actions for {} states",
                    self.id,
                    actions.len(),
                    n
                )));
            }
        }
        Ok(())
    }
}

/// A validated corpus of trajectories sharing one state dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    trajectories: Vec<Trajectory>,
    dim: usize,
}

impl Dataset {
    pub fn new(trajectories: Vec<Trajectory>) -> Result<Self> {
        let first = trajectories
            .first()
            .ok_or_else(|| Error::InvalidDataset("dataset has no trajectories".into()))?;
        let dim = first.states.first().map(State::dim).ok_or_else(|| {
            Error::InvalidDataset(format!("trajectory `{}` has no states", first.id))
        })?;
        Self::with_dim(trajectories, dim)
    }

    /// Build with an explicit dimension, as declared by a corpus header.
    pub fn with_dim(trajectories: Vec<Trajectory>, dim: usize) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(Error::InvalidDataset("dataset has no trajectories".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidDataset("dimension must be at least 1".into()));
        }
        let mut seen = HashSet::with_capacity(trajectories.len());
        for t in &trajectories {
            t.validate()?;
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    id: t.id.clone(),
                    expected: dim,
                    found: t.dim(),
                });
            }
            if !seen.insert(t.id.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate trajectory id `{}`",
                    t.id
                )));
            }
        }
        Ok(Dataset { trajectories, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.trajectories.iter().map(|t| t.reward).collect()
    }

    pub fn states(&self) -> impl Iterator<Item = &State> {
        self.trajectories.iter().flat_map(|t| t.states.iter())
    }

    /// Per-dimension (min, max) over every state.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bb = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for s in self.states() {
            for (b, &v) in bb.iter_mut().zip(s.coords()) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        bb
    }

    /// Length of the bounding-box diagonal.
    pub fn diameter(&self) -> f64 {
        self.bounding_box()
            .iter()
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Centroid of every state in the corpus.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        let mut n = 0usize;
        for s in self.states() {
            for (a, &v) in c.iter_mut().zip(s.coords()) {
                *a += v;
            }
            n += 1;
        }
        c.iter_mut().for_each(|a| *a /= n as f64);
        c
    }

    /// Admissible radius range derived from the workspace diameter.
    pub fn radius_bounds(&self) -> RadiusBounds {
        let mut diam = self.diameter();
        if diam <= 0.0 || !diam.is_finite() {
            // every state coincides
            diam = 1.0;
        }
        RadiusBounds {
            min: 1e-3 * diam,
            max: diam,
        }
    }

    pub(crate) fn check_center(&self, center: &[f64]) -> Result<()> {
        if center.len() != self.dim {
            return Err(Error::DimensionMismatch {
                id: "<region center>".into(),
                expected: self.dim,
                found: center.len(),
            });
        }
        if !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "region center is not finite".into(),
            ));
        }
        Ok(())
    }
}

/// Closed interval of admissible radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusBounds {
    pub min: f64,
    pub max: f64,
}

impl RadiusBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radius bounds must satisfy 0 < min < max, got [{min}, {max}]"
            )));
        }
        Ok(RadiusBounds { min, max })
    }

    pub fn project(&self, r: f64) -> f64 {
        r.clamp(self.min, self.max)
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.min && r <= self.max
    }
}

/// Hyper-sphere `‖z − center‖² ≤ radius²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Region {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "region center is not finite".into(),
            ));
        }
        Ok(Region { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Whether a single point lies inside (boundary included).
    pub fn contains(&self, z: &[f64]) -> bool {
        sq_dist(z, &self.center) <= self.radius * self.radius
    }
}

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_dims(traj: &Trajectory, center: &[f64]) -> Result<()> {
    if traj.dim() != center.len() {
        return Err(Error::DimensionMismatch {
            id: traj.id.clone(),
            expected: center.len(),
            found: traj.dim(),
        });
    }
    Ok(())
}

/// Closest approach of a trajectory to `center`: squared distance and the
/// lowest state index attaining it.
pub fn min_sq_dist(traj: &Trajectory, center: &[f64]) -> Result<(f64, usize)> {
    check_dims(traj, center)?;
    Ok(min_sq_dist_unchecked(traj, center))
}

pub(crate) fn min_sq_dist_unchecked(traj: &Trajectory, center: &[f64]) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (h, s) in traj.states.iter().enumerate() {
        let d = sq_dist(s.coords(), center);
        if d < best {
            best = d;
            arg = h;
        }
    }
    (best, arg)
}

/// Indicator of the trajectory ever entering the region.
pub fn hard_membership(traj: &Trajectory, region: &Region) -> Result<bool> {
    let (d2, _) = min_sq_dist(traj, &region.center)?;
    Ok(d2 <= region.radius * region.radius)
}

/// `1 / (1 + exp(alpha * u))` with the exponent clamped to ±[`EXP_CLAMP`].
#[inline]
pub fn sigmoid_clamped(alpha: f64, u: f64) -> f64 {
    let e = (alpha * u).clamp(-EXP_CLAMP, EXP_CLAMP);
    1.0 / (1.0 + e.exp())
}

/// Sigmoid relaxation of [`hard_membership`] with sharpness `alpha`.
pub fn soft_membership(traj: &Trajectory, region: &Region, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let (d2, _) = min_sq_dist(traj, &region.center)?;
    Ok(sigmoid_clamped(alpha, d2 - region.radius * region.radius))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn traj(rows: Vec<Vec<f64>>) -> Trajectory {
        Trajectory::from_rows("t", rows, 0.0).unwrap()
    }

    #[test]
    fn min_sq_dist_examples() {
        let t = traj(vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
        assert_eq!(min_sq_dist(&t, &[0.0, 0.0]).unwrap(), (0.0, 0));
        assert_eq!(min_sq_dist(&t, &[3.0, 4.0]).unwrap(), (0.0, 1));
        let t = traj(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert_eq!(min_sq_dist(&t, &[0.0, 0.0]).unwrap(), (1.0, 0));
    }

    #[test]
    fn min_sq_dist_tie_takes_lowest_index() {
        let t = traj(vec![vec![2.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert_eq!(min_sq_dist(&t, &[0.0, 0.0]).unwrap(), (1.0, 1));
    }

    #[test]
    fn dimension_mismatch_names_trajectory() {
        let t = Trajectory::from_rows("walk-9", vec![vec![1.0, 0.0]], 0.0).unwrap();
        let err = min_sq_dist(&t, &[0.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { ref id, .. } if id == "walk-9"));
    }

    #[test]
    fn hard_membership_examples() {
        let t = traj(vec![vec![1.0, 0.0]]);
        let c = vec![0.0, 0.0];
        assert!(!hard_membership(&t, &Region::new(c.clone(), 0.5).unwrap()).unwrap());
        assert!(hard_membership(&t, &Region::new(c.clone(), 1.0).unwrap()).unwrap());
        assert!(hard_membership(&t, &Region::new(vec![1.0, 0.0], 1e-6).unwrap()).unwrap());
    }

    #[test]
    fn soft_membership_examples() {
        let t = traj(vec![vec![1.0, 0.0]]);
        let g = soft_membership(&t, &Region::new(vec![0.0, 0.0], 1.0).unwrap(), 3.7).unwrap();
        assert_eq!(g, 0.5);
        // u = 1 - 2 = -1
        let g = soft_membership(
            &t,
            &Region::new(vec![0.0, 0.0], 2f64.sqrt()).unwrap(),
            3f64.ln(),
        )
        .unwrap();
        assert!((g - 0.75).abs() < 1e-12);
        let far = traj(vec![vec![0.0, 51f64.sqrt()]]);
        let g = soft_membership(&far, &Region::new(vec![0.0, 0.0], 1.0).unwrap(), 10.0).unwrap();
        assert!(g < 1e-6);
        assert!(g > 0.0);
    }

    #[test]
    fn soft_membership_rejects_bad_alpha() {
        let t = traj(vec![vec![1.0, 0.0]]);
        let r = Region::new(vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            soft_membership(&t, &r, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            soft_membership(&t, &r, -1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn dataset_validation() {
        let a = Trajectory::from_rows("a", vec![vec![0.0, 0.0]], 1.0).unwrap();
        let b = Trajectory::from_rows("a", vec![vec![1.0, 0.0]], 0.0).unwrap();
        assert!(Dataset::new(vec![a.clone(), b]).is_err());
        let c = Trajectory::from_rows("c", vec![vec![1.0]], 0.0).unwrap();
        assert!(matches!(
            Dataset::new(vec![a.clone(), c]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Dataset::new(vec![]).is_err());
        assert!(Trajectory::from_rows("e", vec![], 0.0).is_err());
        assert!(Trajectory::from_rows("n", vec![vec![f64::NAN]], 0.0).is_err());
        assert!(Trajectory::from_rows("r", vec![vec![0.0]], f64::INFINITY).is_err());
    }

    #[test]
    fn workspace_geometry() {
        let a = Trajectory::from_rows("a", vec![vec![0.0, 0.0], vec![3.0, 0.0]], 1.0).unwrap();
        let b = Trajectory::from_rows("b", vec![vec![0.0, 4.0], vec![1.0, 1.0]], 0.0).unwrap();
        let ds = Dataset::new(vec![a, b]).unwrap();
        assert_eq!(ds.diameter(), 5.0);
        assert_eq!(ds.centroid(), vec![1.0, 1.25]);
        let rb = ds.radius_bounds();
        assert!((rb.min - 5e-3).abs() < 1e-15 && rb.max == 5.0);
    }

    fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..12)
    }

    proptest! {
        #[test]
        fn soft_approaches_hard(rows in rows_strategy(), cx in -5.0f64..5.0, cy in -5.0f64..5.0,
                                r in 0.1f64..4.0, alpha in 1.0f64..1e4) {
            let t = traj(rows);
            let reg = Region::new(vec![cx, cy], r).unwrap();
            let (d2, _) = min_sq_dist(&t, &reg.center).unwrap();
            let delta = (d2 - r * r).abs();
            prop_assume!(delta > 1e-6);
            let g = soft_membership(&t, &reg, alpha).unwrap();
            let i = if hard_membership(&t, &reg).unwrap() { 1.0 } else { 0.0 };
            prop_assert!((g - i).abs() <= 1.0 / (1.0 + (alpha * delta).exp()) + 1e-15);
        }

        #[test]
        fn soft_is_permutation_invariant(rows in rows_strategy(), seed in any::<u64>(),
                                         r in 0.1f64..4.0, alpha in 0.1f64..50.0) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let reg = Region::new(vec![0.3, -0.2], r).unwrap();
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = soft_membership(&traj(rows), &reg, alpha).unwrap();
            let b = soft_membership(&traj(shuffled), &reg, alpha).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn hard_is_monotone_in_radius(rows in rows_strategy(), r1 in 0.01f64..4.0, dr in 0.0f64..3.0) {
            let t = traj(rows);
            let small = hard_membership(&t, &Region::new(vec![1.0, 1.0], r1).unwrap()).unwrap();
            let big = hard_membership(&t, &Region::new(vec![1.0, 1.0], r1 + dr).unwrap()).unwrap();
            prop_assert!(!small || big);
        }

        #[test]
        fn min_sq_dist_rotation_invariant(rows in rows_strategy(), theta in 0.0f64..6.3,
                                          cx in -5.0f64..5.0, cy in -5.0f64..5.0) {
            let (s, c) = theta.sin_cos();
            let rot = |p: &[f64]| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]];
            let rotated: Vec<Vec<f64>> = rows.iter().map(|p| rot(p)).collect();
            let (a, _) = min_sq_dist(&traj(rows), &[cx, cy]).unwrap();
            let (b, _) = min_sq_dist(&traj(rotated), &rot(&[cx, cy])).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        }
    }
}
