//! Planted-truth generators: reflected random walks in the unit cube with
//! rewards decided by visits to hidden regions.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::trajectory::{min_sq_dist_unchecked, Dataset, Region, State, Trajectory};

pub const TRUTH_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    /// Reward iff the walk visits one planted region.
    Paint,
    /// Reward iff the walk visits both planted regions.
    Door,
    /// Reward independent of the walk.
    Null,
}

impl std::str::FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paint" => Ok(TaskKind::Paint),
            "door" => Ok(TaskKind::Door),
            "null" => Ok(TaskKind::Null),
            other => Err(Error::InvalidParameter(format!("unknown task `{other}`"))),
        }
    }
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskKind::Paint => "paint",
            TaskKind::Door => "door",
            TaskKind::Null => "null",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub dim: usize,
    pub horizon: usize,
    pub n_traj: usize,
    pub truth: Vec<Region>,
    pub step_scale: f64,
    pub label_noise: f64,
    /// Success probability for the null task.
    pub null_rate: f64,
    pub seed: u64,
}

impl TaskSpec {
    /// Paint-bucket scenario: one region at (0.7, …) with radius 0.08.
    pub fn paint(dim: usize, seed: u64) -> Self {
        TaskSpec {
            kind: TaskKind::Paint,
            dim,
            horizon: 50,
            n_traj: 200,
            truth: vec![Region {
                center: vec![0.7; dim],
                radius: 0.08,
            }],
            step_scale: 0.05,
            label_noise: 0.0,
            null_rate: 0.3,
            seed,
        }
    }

    /// Door scenario: the card reader and the door, both must be visited.
    pub fn door(dim: usize, seed: u64) -> Self {
        let mut a = vec![0.5; dim];
        let mut b = vec![0.5; dim];
        a[0] = 0.3;
        b[0] = 0.7;
        TaskSpec {
            kind: TaskKind::Door,
            dim,
            horizon: 80,
            n_traj: 300,
            truth: vec![
                Region {
                    center: a,
                    radius: 0.1,
                },
                Region {
                    center: b,
                    radius: 0.1,
                },
            ],
            step_scale: 0.05,
            label_noise: 0.0,
            null_rate: 0.3,
            seed,
        }
    }

    pub fn null(dim: usize, seed: u64) -> Self {
        TaskSpec {
            kind: TaskKind::Null,
            truth: vec![],
            ..Self::paint(dim, seed)
        }
    }

    pub fn for_kind(kind: TaskKind, dim: usize, seed: u64) -> Self {
        match kind {
            TaskKind::Paint => Self::paint(dim, seed),
            TaskKind::Door => Self::door(dim, seed),
            TaskKind::Null => Self::null(dim, seed),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.horizon == 0 || self.n_traj == 0 {
            return Err(Error::InvalidParameter(
                "dim, horizon and n_traj must be positive".into(),
            ));
        }
        if !(0.0..0.5).contains(&self.label_noise) {
            return Err(Error::InvalidParameter(format!(
                "label noise must lie in [0, 0.5), got {}",
                self.label_noise
            )));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::InvalidParameter(
                "step scale must be positive".into(),
            ));
        }
        let expected = match self.kind {
            TaskKind::Paint => 1,
            TaskKind::Door => 2,
            TaskKind::Null => 0,
        };
        if self.truth.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "{} task needs {expected} planted regions, got {}",
                self.kind,
                self.truth.len()
            )));
        }
        for r in &self.truth {
            if r.center.len() != self.dim {
                return Err(Error::InvalidParameter(
                    "planted region dimension mismatch".into(),
                ));
            }
            if r.radius <= 0.0 || r.center.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::InvalidParameter(
                    "planted regions must have positive radius and lie in the unit workspace"
                        .into(),
                ));
            }
        }
        if self.kind == TaskKind::Null && !(0.0..=1.0).contains(&self.null_rate) {
            return Err(Error::InvalidParameter(
                "null rate must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Sidecar describing what was planted. Only evaluation reads it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub schema_version: u32,
    pub kind: TaskKind,
    pub regions: Vec<Region>,
    pub label_noise: f64,
    pub seed: u64,
    pub success_fraction: f64,
    pub spec: TaskSpec,
}

impl Truth {
    /// Noise-free reward implied by the planted regions.
    pub fn clean_reward(&self, traj: &Trajectory) -> Option<f64> {
        match self.kind {
            TaskKind::Null => None,
            TaskKind::Paint | TaskKind::Door => Some(if visits_all(traj, &self.regions) {
                1.0
            } else {
                0.0
            }),
        }
    }
}

fn visits_all(traj: &Trajectory, regions: &[Region]) -> bool {
    regions
        .iter()
        .all(|r| min_sq_dist_unchecked(traj, &r.center).0 <= r.radius * r.radius)
}

/// Fold a coordinate back into [0, 1] by mirror reflection.
pub fn reflect_unit(x: f64) -> f64 {
    let m = x.rem_euclid(2.0);
    if m > 1.0 {
        2.0 - m
    } else {
        m
    }
}

fn walk<R: Rng>(rng: &mut R, dim: usize, horizon: usize, step: &Normal<f64>) -> Vec<State> {
    let mut z: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let mut states = Vec::with_capacity(horizon);
    states.push(State(z.clone()));
    for _ in 1..horizon {
        for c in z.iter_mut() {
            *c = reflect_unit(*c + step.sample(rng));
        }
        states.push(State(z.clone()));
    }
    states
}

/// Generate a dataset for any task kind.
pub fn generate(spec: &TaskSpec) -> Result<(Dataset, Truth)> {
    spec.validate()?;
    let step = Normal::new(0.0, spec.step_scale)
        .map_err(|e| Error::InvalidParameter(format!("step distribution: {e}")))?;
    let mut trajs = Vec::with_capacity(spec.n_traj);
    for l in 0..spec.n_traj {
        let mut walk_rng = rng::stream(spec.seed, "walk", &[l as u64]);
        let states = walk(&mut walk_rng, spec.dim, spec.horizon, &step);
        let mut label_rng = rng::stream(spec.seed, "label", &[l as u64]);
        let clean = match spec.kind {
            TaskKind::Null => label_rng.random::<f64>() < spec.null_rate,
            _ => {
                let t = Trajectory {
                    id: String::new(),
                    states: states.clone(),
                    actions: None,
                    reward: 0.0,
                };
                visits_all(&t, &spec.truth)
            }
        };
        let flip = spec.label_noise > 0.0 && label_rng.random::<f64>() < spec.label_noise;
        let success = clean != flip;
        trajs.push(Trajectory::new(
            format!("traj-{l:05}"),
            states,
            if success { 1.0 } else { 0.0 },
        )?);
    }
    let fraction = trajs.iter().filter(|t| t.reward > 0.5).count() as f64 / spec.n_traj as f64;
    if !(0.05..=0.95).contains(&fraction) {
        return Err(Error::SuccessFraction { fraction });
    }
    let dataset = Dataset::new(trajs)?;
    let truth = Truth {
        schema_version: TRUTH_SCHEMA_VERSION,
        kind: spec.kind,
        regions: spec.truth.clone(),
        label_noise: spec.label_noise,
        seed: spec.seed,
        success_fraction: fraction,
        spec: spec.clone(),
    };
    Ok((dataset, truth))
}

fn require(spec: &TaskSpec, kind: TaskKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::InvalidParameter(format!(
            "expected a {kind} task, got {}",
            spec.kind
        )));
    }
    Ok(())
}

pub fn gen_paint(spec: &TaskSpec) -> Result<(Dataset, Truth)> {
    require(spec, TaskKind::Paint)?;
    generate(spec)
}

pub fn gen_door(spec: &TaskSpec) -> Result<(Dataset, Truth)> {
    require(spec, TaskKind::Door)?;
    generate(spec)
}

pub fn gen_null(spec: &TaskSpec) -> Result<(Dataset, Truth)> {
    require(spec, TaskKind::Null)?;
    generate(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection() {
        assert_eq!(reflect_unit(0.3), 0.3);
        assert!((reflect_unit(1.2) - 0.8).abs() < 1e-12);
        assert!((reflect_unit(-0.25) - 0.25).abs() < 1e-12);
        assert!((reflect_unit(2.3) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn paint_labels_follow_truth() {
        let (ds, truth) = gen_paint(&TaskSpec::paint(2, 3)).unwrap();
        for t in ds.trajectories() {
            assert_eq!(Some(t.reward), truth.clean_reward(t));
            assert!(t
                .states
                .iter()
                .all(|s| s.coords().iter().all(|c| (0.0..=1.0).contains(c))));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_paint(&TaskSpec::paint(2, 11)).unwrap();
        let b = gen_paint(&TaskSpec::paint(2, 11)).unwrap();
        assert_eq!(a.0, b.0);
        let c = gen_paint(&TaskSpec::paint(2, 12)).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn door_is_a_conjunction() {
        let spec = TaskSpec::door(2, 5);
        let only_a = Trajectory::from_rows("a", vec![vec![0.3, 0.5], vec![0.3, 0.9]], 0.0).unwrap();
        let both = Trajectory::from_rows("ab", vec![vec![0.3, 0.5], vec![0.7, 0.5]], 0.0).unwrap();
        assert!(!visits_all(&only_a, &spec.truth));
        assert!(visits_all(&both, &spec.truth));
        let (ds, truth) = gen_door(&spec).unwrap();
        for t in ds.trajectories() {
            assert_eq!(Some(t.reward), truth.clean_reward(t));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = TaskSpec::paint(2, 1);
        s.label_noise = 0.5;
        assert!(generate(&s).is_err());
        let mut s = TaskSpec::paint(2, 1);
        s.truth[0].radius = 1e-4;
        assert!(matches!(generate(&s), Err(Error::SuccessFraction { .. })));
        assert!(gen_door(&TaskSpec::paint(2, 1)).is_err());
    }
}
