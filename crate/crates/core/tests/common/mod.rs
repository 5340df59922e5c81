//! Independent oracles shared by the integration and acceptance targets.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use trajregions::entropy::{
    assignment_entropy, conditional_entropy, conditional_entropy_single, estimate_joint,
    information_gain, joint_entropy, marginal_entropy, objective_with_gradient, MembershipMatrix,
};
use trajregions::reward::RewardAlphabet;
use trajregions::trajectory::{Dataset, Region, Trajectory};

pub const STEP: f64 = 1e-5;
pub const REL_TOL: f64 = 1e-4;

pub fn shannon(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.ln())
        .sum()
}

/// Joint distribution over (assignment, label) built cell by cell.
pub fn brute_joint(rows: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let m = rows[0].len();
    let n = rows.len() as f64;
    let mut p = vec![vec![0.0; k]; 1 << m];
    for (mu, cells) in p.iter_mut().enumerate() {
        for (row, &lab) in rows.iter().zip(labels) {
            let w: f64 = row
                .iter()
                .enumerate()
                .map(|(j, &g)| if mu >> j & 1 == 1 { g } else { 1.0 - g })
                .product();
            cells[lab] += w / n;
        }
    }
    p
}

pub struct Case {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub k: usize,
}

pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let n = rng.random_range(1..=40);
    let m = rng.random_range(1..=4);
    let k = rng.random_range(1..=4);
    let hard = rng.random_bool(0.5);
    let rows = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    if hard {
                        if rng.random_bool(0.5) {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|_| rng.random_range(0..k)).collect();
    Case { rows, labels, k }
}

/// Soft `H(R | M)` straight from the definitions: per-trajectory visit
/// probability as the largest per-state sigmoid, product-form joint table,
/// `Σ P(μ,r) ln(P(μ)/P(μ,r))`.
pub fn soft_entropy_oracle(
    data: &Dataset,
    labels: &[usize],
    k: usize,
    frozen: &[Region],
    free: &Region,
    alpha: f64,
) -> f64 {
    let m = frozen.len() + 1;
    let n = data.len() as f64;
    let mut joint = vec![0.0; (1 << m) * k];
    for (t, &lab) in data.trajectories().iter().zip(labels) {
        let mut bits = 0usize;
        for (j, r) in frozen.iter().enumerate() {
            if t.states.iter().any(|s| r.contains(s.coords())) {
                bits |= 1 << j;
            }
        }
        let g = t
            .states
            .iter()
            .map(|s| {
                let d2: f64 = s
                    .coords()
                    .iter()
                    .zip(&free.center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                1.0 / (1.0 + (alpha * (d2 - free.radius * free.radius)).exp())
            })
            .fold(0.0, f64::max);
        let free_bit = 1 << frozen.len();
        joint[(bits | free_bit) * k + lab] += g / n;
        joint[bits * k + lab] += (1.0 - g) / n;
    }
    let mut h = 0.0;
    for mu in 0..(1 << m) {
        let pm: f64 = joint[mu * k..(mu + 1) * k].iter().sum();
        for &p in &joint[mu * k..(mu + 1) * k] {
            if p > 0.0 {
                h += p * (pm / p).ln();
            }
        }
    }
    h
}

pub struct Probe {
    pub data: Dataset,
    pub labels: Vec<usize>,
    pub k: usize,
    pub frozen: Vec<Region>,
    pub free: Region,
    pub alpha: f64,
}

pub fn random_probe(rng: &mut ChaCha8Rng) -> Probe {
    let dim = rng.random_range(1..=3);
    let n_traj = rng.random_range(6..=20);
    let k = rng.random_range(2..=3);
    let trajs = (0..n_traj)
        .map(|i| {
            let len = rng.random_range(2..=8);
            let rows = (0..len)
                .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
                .collect();
            Trajectory::from_rows(format!("t{i}"), rows, 0.0).unwrap()
        })
        .collect();
    let data = Dataset::new(trajs).unwrap();
    // every label present so H(R) > 0
    let labels: Vec<usize> = (0..n_traj)
        .map(|i| if i < k { i } else { rng.random_range(0..k) })
        .collect();
    let n_frozen = rng.random_range(0..=2);
    let frozen = (0..n_frozen)
        .map(|_| Region {
            center: (0..dim).map(|_| rng.random::<f64>()).collect(),
            radius: rng.random_range(0.1..0.5),
        })
        .collect();
    let free = Region {
        center: (0..dim).map(|_| rng.random::<f64>()).collect(),
        radius: rng.random_range(0.1..0.6),
    };
    Probe {
        data,
        labels,
        k,
        frozen,
        free,
        alpha: rng.random_range(1.0..40.0),
    }
}

/// Smallest gap between the two closest states of any trajectory; the
/// closest state must not switch under a perturbation of size `STEP`.
pub fn argmin_margin(data: &Dataset, center: &[f64]) -> f64 {
    data.trajectories()
        .iter()
        .map(|t| {
            let mut d: Vec<f64> = t
                .states
                .iter()
                .map(|s| {
                    s.coords()
                        .iter()
                        .zip(center)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum()
                })
                .collect();
            d.sort_by(f64::total_cmp);
            d[1] - d[0]
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    diff / scale
}

pub enum ProbeOutcome {
    /// Closest-state ties or a flat landscape: no usable comparison.
    Skipped,
    /// Value disagrees with the oracle by this much.
    ValueMismatch(f64),
    Checked {
        rel_err: f64,
        analytic: Vec<f64>,
        numeric: Vec<f64>,
    },
}

pub fn check_probe(p: &Probe) -> ProbeOutcome {
    if argmin_margin(&p.data, &p.free.center) < 1e-3 {
        return ProbeOutcome::Skipped;
    }
    let alphabet = RewardAlphabet::from_labels(p.labels.clone(), p.k).unwrap();
    let eval = objective_with_gradient(&p.data, &alphabet, &p.frozen, &p.free, p.alpha).unwrap();
    let f = |r: &Region| soft_entropy_oracle(&p.data, &p.labels, p.k, &p.frozen, r, p.alpha);
    let gap = (eval.value - f(&p.free)).abs();
    if gap >= 1e-12 {
        return ProbeOutcome::ValueMismatch(gap);
    }
    let mut analytic = eval.grad_center.clone();
    analytic.push(eval.grad_radius);
    if analytic.iter().map(|g| g * g).sum::<f64>().sqrt() < 1e-6 {
        return ProbeOutcome::Skipped;
    }
    let numeric = (0..=p.free.center.len())
        .map(|j| {
            let mut plus = p.free.clone();
            let mut minus = p.free.clone();
            if j < p.free.center.len() {
                plus.center[j] += STEP;
                minus.center[j] -= STEP;
            } else {
                plus.radius += STEP;
                minus.radius -= STEP;
            }
            (f(&plus) - f(&minus)) / (2.0 * STEP)
        })
        .collect::<Vec<_>>();
    ProbeOutcome::Checked {
        rel_err: rel_err(&analytic, &numeric),
        analytic,
        numeric,
    }
}

/// First identity the library violates on this case, if any.
pub fn identity_violation(c: &Case) -> Option<String> {
    let labels = RewardAlphabet::from_labels(c.labels.clone(), c.k).unwrap();
    let table = estimate_joint(&MembershipMatrix::from_rows(&c.rows).unwrap(), &labels).unwrap();

    let brute = brute_joint(&c.rows, &c.labels, c.k);
    let h_mr = shannon(brute.iter().flatten().copied());
    let h_m = shannon(brute.iter().map(|r| r.iter().sum()));
    let h_r = shannon((0..c.k).map(|j| brute.iter().map(|r| r[j]).sum()));

    let h = conditional_entropy(&table);
    let h_reward = marginal_entropy(&labels);
    let ig = information_gain(&labels, &table);
    if h < 0.0 {
        return Some(format!("negative conditional entropy {h}"));
    }
    if h > h_reward + 1e-9 {
        return Some(format!("{h} exceeds H(R) {h_reward}"));
    }
    if ig < -1e-9 {
        return Some(format!("information gain {ig}"));
    }
    if (h - (h_mr - h_m)).abs() > 1e-9 {
        return Some(format!("chain rule: {h} vs {}", h_mr - h_m));
    }
    if (h - (joint_entropy(&table) - assignment_entropy(&table))).abs() > 1e-9 {
        return Some("library joint and assignment entropies disagree".into());
    }
    if (h_reward - h_r).abs() > 1e-12 {
        return Some(format!("reward marginal {h_reward} vs {h_r}"));
    }
    if c.rows[0].len() == 1 {
        let single = conditional_entropy_single(&table).unwrap();
        if (single - h).abs() > 1e-12 {
            return Some(format!("single-variable form {single} vs {h}"));
        }
    }
    None
}
