//! Exhaustive reference search over candidate centers × radii.

use rayon::prelude::*;

use crate::entropy::Objective;
use crate::error::{Error, Result};
use crate::reward::RewardAlphabet;
use crate::trajectory::{Dataset, RadiusBounds, Region};

pub const DEFAULT_RADII: usize = 32;

/// Every state of every trajectory, in corpus order.
pub fn default_centers(dataset: &Dataset) -> Vec<Vec<f64>> {
    dataset.states().map(|s| s.0.clone()).collect()
}

/// `n` radii geometrically spaced over `[bounds.min, bounds.max]`.
pub fn geometric_radii(bounds: RadiusBounds, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![bounds.min],
        _ => {
            let ratio = (bounds.max / bounds.min).ln();
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        bounds.max
                    } else {
                        bounds.min * (ratio * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Hard entropy of every (center, radius) pair, row-major by center.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub entropies: Vec<f64>,
}

impl GridTable {
    pub fn entropy(&self, center: usize, radius: usize) -> f64 {
        self.entropies[center * self.radii.len() + radius]
    }

    /// CSV with columns `center_index,radius_index,cx1..cxd,radius,h_hard`.
    pub fn to_csv(&self) -> String {
        let d = self.centers.first().map_or(0, Vec::len);
        let mut out = String::from("center_index,radius_index");
        for j in 1..=d {
            out.push_str(&format!(",cx{j}"));
        }
        out.push_str(",radius,h_hard\n");
        for (ci, c) in self.centers.iter().enumerate() {
            for (ri, r) in self.radii.iter().enumerate() {
                out.push_str(&format!("{ci},{ri}"));
                for v in c {
                    out.push_str(&format!(",{v}"));
                }
                out.push_str(&format!(",{r},{}\n", self.entropy(ci, ri)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best: Region,
    pub h_hard: f64,
    pub center_index: usize,
    pub radius_index: usize,
    pub table: GridTable,
}

/// Evaluate the hard conditional entropy of `frozen ∪ {candidate}` for every
/// candidate and return the minimum. Ties go to the lexicographically
/// smallest `(center, radius)`, so the answer does not depend on candidate order.
pub fn grid_search(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    frozen: &[Region],
    centers: &[Vec<f64>],
    radii: &[f64],
) -> Result<OracleResult> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::InvalidParameter(
            "oracle candidate sets must be non-empty".into(),
        ));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "oracle radius {r} is not positive"
        )));
    }
    for c in centers {
        dataset.check_center(c)?;
    }
    let objective = Objective::new(dataset, labels, frozen)?;
    let entropies: Vec<f64> = centers
        .par_iter()
        .flat_map_iter(|c| {
            let app = objective.approaches(c);
            radii
                .iter()
                .map(|&r| objective.hard_entropy_from(r, &app))
                .collect::<Vec<_>>()
        })
        .collect();
    let nr = radii.len();
    let canonical = |i: usize, j: usize| {
        let (a, b) = (&centers[i / nr], &centers[j / nr]);
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(radii[i % nr].total_cmp(&radii[j % nr]))
            .then(i.cmp(&j))
    };
    let mut best = 0;
    for (i, &h) in entropies.iter().enumerate() {
        if h < entropies[best] || (h == entropies[best] && canonical(i, best).is_lt()) {
            best = i;
        }
    }
    let (ci, ri) = (best / radii.len(), best % radii.len());
    Ok(OracleResult {
        best: Region {
            center: centers[ci].clone(),
            radius: radii[ri],
        },
        h_hard: entropies[best],
        center_index: ci,
        radius_index: ri,
        table: GridTable {
            centers: centers.to_vec(),
            radii: radii.to_vec(),
            entropies,
        },
    })
}

/// [`grid_search`] with every visited state as a center and
/// [`DEFAULT_RADII`] geometric radii over the dataset's radius bounds.
pub fn grid_search_default(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    frozen: &[Region],
) -> Result<OracleResult> {
    let centers = default_centers(dataset);
    let radii = geometric_radii(dataset.radius_bounds(), DEFAULT_RADII);
    grid_search(dataset, labels, frozen, &centers, &radii)
}
