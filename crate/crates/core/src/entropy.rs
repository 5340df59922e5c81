//! Joint membership/reward distributions, entropies, and the relaxed objective.
//!
//! All entropies are in nats and use `0 · ln 0 = 0`. Membership assignments
//! `μ ∈ {0,1}ᵐ` are indexed by the integer whose bit `j` is `μ_j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::RewardAlphabet;
use crate::trajectory::{
    check_alpha, min_sq_dist_unchecked, sigmoid_clamped, Dataset, Region, EXP_CLAMP,
};

/// Largest supported number of membership variables in a dense table.
pub const MAX_VARIABLES: usize = 16;

#[inline]
pub fn xlnx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Convert nats to bits.
pub fn to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// `L × m` matrix of memberships in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl MembershipMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "membership matrix expects {} entries, got {}",
                rows * cols,
                values.len()
            )));
        }
        if cols > MAX_VARIABLES {
            return Err(Error::InvalidParameter(format!(
                "at most {MAX_VARIABLES} membership variables supported"
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!(
                "membership {v} outside [0, 1]"
            )));
        }
        Ok(MembershipMatrix { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged membership rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Single-variable column.
    pub fn column(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    /// Hard memberships of every trajectory in each region.
    pub fn hard(dataset: &Dataset, regions: &[Region]) -> Result<Self> {
        let mut values = Vec::with_capacity(dataset.len() * regions.len());
        for r in regions {
            dataset.check_center(&r.center)?;
        }
        for t in dataset.trajectories() {
            for r in regions {
                let (d2, _) = min_sq_dist_unchecked(t, &r.center);
                values.push(if d2 <= r.radius * r.radius { 1.0 } else { 0.0 });
            }
        }
        Self::new(dataset.len(), regions.len(), values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, l: usize, j: usize) -> f64 {
        self.values[l * self.cols + j]
    }

    pub fn row(&self, l: usize) -> &[f64] {
        &self.values[l * self.cols..(l + 1) * self.cols]
    }
}

/// Dense `P(μ, r_k)` over `2ᵐ × K` cells with its marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    pub m: usize,
    pub k: usize,
    /// Row-major, `probs[assignment * k + reward]`.
    pub probs: Vec<f64>,
    pub marginal_r: Vec<f64>,
    pub marginal_mu: Vec<f64>,
}

impl JointTable {
    /// Normalize raw cell masses (already divided by L) and fill marginals.
    fn from_cells(m: usize, k: usize, probs: Vec<f64>) -> Self {
        let n_assign = 1usize << m;
        let mut marginal_r = vec![0.0; k];
        let mut marginal_mu = vec![0.0; n_assign];
        for a in 0..n_assign {
            for r in 0..k {
                let p = probs[a * k + r];
                marginal_mu[a] += p;
                marginal_r[r] += p;
            }
        }
        JointTable {
            m,
            k,
            probs,
            marginal_r,
            marginal_mu,
        }
    }

    pub fn prob(&self, assignment: usize, reward: usize) -> f64 {
        self.probs[assignment * self.k + reward]
    }

    pub fn n_assignments(&self) -> usize {
        1 << self.m
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Frequency estimate of `P(μ, r_k)`, using the product of memberships (or
/// their complements) as each trajectory's weight on an assignment.
pub fn estimate_joint(
    memberships: &MembershipMatrix,
    labels: &RewardAlphabet,
) -> Result<JointTable> {
    let l = memberships.rows();
    if l == 0 {
        return Err(Error::InvalidParameter("no trajectories".into()));
    }
    if l != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "membership matrix has {l} rows but {} labels",
            labels.len()
        )));
    }
    let m = memberships.cols();
    let k = labels.k();
    let n_assign = 1usize << m;
    let mut probs = vec![0.0; n_assign * k];
    let inv_l = 1.0 / l as f64;
    for row in 0..l {
        let mu = memberships.row(row);
        let lab = labels.label(row);
        for a in 0..n_assign {
            let mut w = inv_l;
            for (j, &v) in mu.iter().enumerate() {
                w *= if a >> j & 1 == 1 { v } else { 1.0 - v };
            }
            probs[a * k + lab] += w;
        }
    }
    Ok(JointTable::from_cells(m, k, probs))
}

/// `H(R | M¹…Mᵐ) = Σ_μ [P(μ) ln P(μ) − Σ_k P(μ, r_k) ln P(μ, r_k)]`.
pub fn conditional_entropy(table: &JointTable) -> f64 {
    let mut h = 0.0;
    for a in 0..table.n_assignments() {
        h += xlnx(table.marginal_mu[a]);
        for r in 0..table.k {
            h -= xlnx(table.prob(a, r));
        }
    }
    h.max(0.0)
}

/// `H(μ, R)`.
pub fn joint_entropy(table: &JointTable) -> f64 {
    table.probs.iter().fold(0.0, |h, &p| h - xlnx(p))
}

/// `H(μ)`.
pub fn assignment_entropy(table: &JointTable) -> f64 {
    table.marginal_mu.iter().fold(0.0, |h, &p| h - xlnx(p))
}

/// Two-term ratio form for a single variable:
/// `Σ_k −P(0,k) ln(P(0,k)/P(0)) − P(1,k) ln(P(1,k)/P(1))`.
pub fn conditional_entropy_single(table: &JointTable) -> Result<f64> {
    if table.m != 1 {
        return Err(Error::InvalidParameter(format!(
            "single-variable expansion needs m = 1, got {}",
            table.m
        )));
    }
    let term = |p: f64, marg: f64| if p > 0.0 { -p * (p / marg).ln() } else { 0.0 };
    let mut h = 0.0;
    for r in 0..table.k {
        h += term(table.prob(0, r), table.marginal_mu[0]);
        h += term(table.prob(1, r), table.marginal_mu[1]);
    }
    Ok(h)
}

/// `H(R)` from label frequencies.
pub fn marginal_entropy(labels: &RewardAlphabet) -> f64 {
    let n = labels.len() as f64;
    labels
        .counts()
        .iter()
        .fold(0.0, |h, &c| h - xlnx(c as f64 / n))
}

/// `IG = H(R) − H(R | M…)`.
pub fn information_gain(labels: &RewardAlphabet, table: &JointTable) -> f64 {
    marginal_entropy(labels) - conditional_entropy(table)
}

/// Relaxed objective value and its gradient with respect to the free region.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveEval {
    /// Soft conditional entropy `H(R | M¹…Mⁱ)` in nats.
    pub value: f64,
    pub grad_center: Vec<f64>,
    pub grad_radius: f64,
    /// Set when `H(R) = 0`: every region gives the same (zero) objective.
    pub degenerate_labels: bool,
}

/// Closest approach of each trajectory to a candidate center.
#[derive(Debug, Clone)]
pub(crate) struct Approach {
    pub dist2: f64,
    pub argmin: usize,
}

/// Conditional-entropy objective for one free region on top of frozen ones.
///
/// Frozen regions enter as hard indicators, precomputed once as a bit
/// pattern per trajectory.
#[derive(Debug, Clone)]
pub struct Objective<'a> {
    dataset: &'a Dataset,
    labels: &'a RewardAlphabet,
    frozen_patterns: Vec<usize>,
    n_frozen: usize,
    reward_entropy: f64,
    deterministic: bool,
}

impl<'a> Objective<'a> {
    pub fn new(
        dataset: &'a Dataset,
        labels: &'a RewardAlphabet,
        frozen: &[Region],
    ) -> Result<Self> {
        if labels.len() != dataset.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} trajectories",
                labels.len(),
                dataset.len()
            )));
        }
        if frozen.len() + 1 > MAX_VARIABLES {
            return Err(Error::InvalidParameter(format!(
                "at most {MAX_VARIABLES} membership variables supported"
            )));
        }
        let hard = MembershipMatrix::hard(dataset, frozen)?;
        let frozen_patterns = (0..dataset.len())
            .map(|l| {
                hard.row(l).iter().enumerate().fold(0usize, |acc, (j, &v)| {
                    if v > 0.5 {
                        acc | 1 << j
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Ok(Objective {
            dataset,
            labels,
            frozen_patterns,
            n_frozen: frozen.len(),
            reward_entropy: marginal_entropy(labels),
            deterministic: true,
        })
    }

    /// In non-deterministic mode the per-cell accumulation is a parallel
    /// reduction whose summation order is not fixed.
    pub fn deterministic(mut self, on: bool) -> Self {
        self.deterministic = on;
        self
    }

    pub fn reward_entropy(&self) -> f64 {
        self.reward_entropy
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub(crate) fn approaches(&self, center: &[f64]) -> Vec<Approach> {
        self.dataset
            .trajectories()
            .par_iter()
            .map(|t| {
                let (dist2, argmin) = min_sq_dist_unchecked(t, center);
                Approach { dist2, argmin }
            })
            .collect()
    }

    /// Cell index of trajectory `l` with free-variable bit `bit`. The free
    /// variable is the last column, after the frozen ones.
    #[inline]
    fn cell(&self, l: usize, bit: usize) -> usize {
        ((self.frozen_patterns[l] | bit << self.n_frozen) * self.labels.k()) + self.labels.label(l)
    }

    /// `weights[l] = (g_l, 1 − g_l)`, the two passed separately so that
    /// neither side loses precision when the sigmoid saturates.
    fn accumulate(&self, weights: &[(f64, f64)]) -> Vec<f64> {
        let n_cells = (1usize << (self.n_frozen + 1)) * self.labels.k();
        let inv_l = 1.0 / self.dataset.len() as f64;
        if self.deterministic {
            let mut cells = vec![0.0; n_cells];
            for (l, &(g, h)) in weights.iter().enumerate() {
                cells[self.cell(l, 1)] += g * inv_l;
                cells[self.cell(l, 0)] += h * inv_l;
            }
            cells
        } else {
            weights
                .par_iter()
                .enumerate()
                .fold(
                    || vec![0.0; n_cells],
                    |mut cells, (l, &(g, h))| {
                        cells[self.cell(l, 1)] += g * inv_l;
                        cells[self.cell(l, 0)] += h * inv_l;
                        cells
                    },
                )
                .reduce(
                    || vec![0.0; n_cells],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                )
        }
    }

    fn table_from_weights(&self, weights: &[(f64, f64)]) -> JointTable {
        JointTable::from_cells(self.n_frozen + 1, self.labels.k(), self.accumulate(weights))
    }

    /// Joint table with the free region as a hard indicator.
    pub fn hard_table(&self, region: &Region) -> Result<JointTable> {
        self.dataset.check_center(&region.center)?;
        let app = self.approaches(&region.center);
        Ok(self.hard_table_from(region.radius, &app))
    }

    pub(crate) fn hard_table_from(&self, radius: f64, app: &[Approach]) -> JointTable {
        let r2 = radius * radius;
        let w: Vec<(f64, f64)> = app
            .iter()
            .map(|a| {
                if a.dist2 <= r2 {
                    (1.0, 0.0)
                } else {
                    (0.0, 1.0)
                }
            })
            .collect();
        self.table_from_weights(&w)
    }

    /// Hard conditional entropy with the free region as an indicator.
    pub fn hard_entropy(&self, region: &Region) -> Result<f64> {
        Ok(conditional_entropy(&self.hard_table(region)?))
    }

    pub(crate) fn hard_entropy_from(&self, radius: f64, app: &[Approach]) -> f64 {
        conditional_entropy(&self.hard_table_from(radius, app))
    }

    /// Soft memberships `g_l` of the free region.
    pub fn soft_memberships(&self, region: &Region, alpha: f64) -> Result<Vec<f64>> {
        check_alpha(alpha)?;
        self.dataset.check_center(&region.center)?;
        let r2 = region.radius * region.radius;
        Ok(self
            .approaches(&region.center)
            .iter()
            .map(|a| sigmoid_clamped(alpha, a.dist2 - r2))
            .collect())
    }

    /// Soft objective and its exact gradient.
    pub fn evaluate(&self, region: &Region, alpha: f64) -> Result<ObjectiveEval> {
        check_alpha(alpha)?;
        self.dataset.check_center(&region.center)?;
        let app = self.approaches(&region.center);
        Ok(self.evaluate_from(region, alpha, &app))
    }

    pub(crate) fn evaluate_from(
        &self,
        region: &Region,
        alpha: f64,
        app: &[Approach],
    ) -> ObjectiveEval {
        let dim = self.dataset.dim();
        let r2 = region.radius * region.radius;
        let mut g = Vec::with_capacity(app.len());
        // α·g(1−g), zero where the exponent is clamped
        let mut slope = Vec::with_capacity(app.len());
        for a in app {
            let x = alpha * (a.dist2 - r2);
            let xc = x.clamp(-EXP_CLAMP, EXP_CLAMP);
            let inside = 1.0 / (1.0 + xc.exp());
            let outside = 1.0 / (1.0 + (-xc).exp());
            g.push((inside, outside));
            slope.push(if x.abs() < EXP_CLAMP {
                alpha * inside * outside
            } else {
                0.0
            });
        }
        let table = self.table_from_weights(&g);
        let value = conditional_entropy(&table);

        // ∂H/∂P(μ,k) = −(ln P(μ,k) + 1); ∂H/∂P(μ) = ln P(μ) + 1.
        // A trajectory moves mass g from (μ0,k) to (μ1,k), so
        // ∂H/∂g_l = (1/L)[ln P(μ1) − ln P(μ1,k) − ln P(μ0) + ln P(μ0,k)].
        let inv_l = 1.0 / self.dataset.len() as f64;
        let k = self.labels.k();
        let trajs = self.dataset.trajectories();
        let mut grad_center = vec![0.0; dim];
        let mut grad_radius = 0.0;
        for (l, a) in app.iter().enumerate() {
            let s = slope[l];
            if s == 0.0 {
                continue;
            }
            let c1 = self.cell(l, 1);
            let c0 = self.cell(l, 0);
            let a1 = c1 / k;
            let a0 = c0 / k;
            let dh_dg = inv_l
                * (table.marginal_mu[a1].ln() - table.probs[c1].ln() - table.marginal_mu[a0].ln()
                    + table.probs[c0].ln());
            // dg/du = −s, u = d² − ε², ∂u/∂C = 2(C − z*), ∂u/∂ε = −2ε
            let dh_du = -dh_dg * s;
            let z = trajs[l].states[a.argmin].coords();
            for (gc, (c, zi)) in grad_center.iter_mut().zip(region.center.iter().zip(z)) {
                *gc += dh_du * 2.0 * (c - zi);
            }
            grad_radius += dh_du * (-2.0 * region.radius);
        }
        ObjectiveEval {
            value,
            grad_center,
            grad_radius,
            degenerate_labels: self.reward_entropy <= 0.0,
        }
    }
}

/// Relaxed conditional entropy of the free region (soft) given frozen
/// regions (hard), with its gradient in `(center, radius)`.
pub fn objective_with_gradient(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    frozen: &[Region],
    free: &Region,
    alpha: f64,
) -> Result<ObjectiveEval> {
    Objective::new(dataset, labels, frozen)?.evaluate(free, alpha)
}
