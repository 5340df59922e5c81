//! Annealed gradient descent on the relaxed conditional entropy of one region.

use serde::{Deserialize, Serialize};

use crate::entropy::Objective;
use crate::error::{Error, Result};
use crate::reward::RewardAlphabet;
use crate::trajectory::{Dataset, RadiusBounds, Region};

/// Geometric sharpness schedule: `α(t) = min(α₀ · growth^⌊t/period⌋, α_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub alpha0: f64,
    pub growth: f64,
    pub period: usize,
    pub alpha_max: f64,
}

impl AnnealSchedule {
    pub fn new(alpha0: f64, growth: f64, period: usize, alpha_max: f64) -> Result<Self> {
        let s = AnnealSchedule {
            alpha0,
            growth,
            period,
            alpha_max,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha0 must be positive, got {}",
                self.alpha0
            )));
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "growth must exceed 1, got {}",
                self.growth
            )));
        }
        if self.period == 0 {
            return Err(Error::InvalidParameter(
                "anneal period must be at least 1".into(),
            ));
        }
        if !(self.alpha_max >= self.alpha0 && self.alpha_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha_max {} must be finite and at least alpha0 {}",
                self.alpha_max, self.alpha0
            )));
        }
        Ok(())
    }

    pub fn alpha_at(&self, step: usize) -> f64 {
        let n = (step / self.period).min(i32::MAX as usize) as i32;
        (self.alpha0 * self.growth.powi(n)).min(self.alpha_max)
    }
}

/// User-facing optimizer settings; unset fields resolve from the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub lr: Option<f64>,
    pub max_steps: usize,
    pub tol: f64,
    pub alpha0: Option<f64>,
    pub growth: f64,
    pub period: Option<usize>,
    pub alpha_max: Option<f64>,
    pub momentum: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            lr: None,
            max_steps: 400,
            tol: 1e-4,
            alpha0: None,
            growth: 2.0,
            period: None,
            alpha_max: None,
            momentum: 0.0,
        }
    }
}

/// Fully resolved optimizer settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimSettings {
    pub schedule: AnnealSchedule,
    /// Step length (workspace units) at `alpha0`.
    pub lr: f64,
    pub max_steps: usize,
    pub tol: f64,
    pub momentum: f64,
    pub bounds: RadiusBounds,
}

impl OptimSettings {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lr must be positive, got {}",
                self.lr
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidParameter(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        Ok(())
    }
}

/// Default `α₀ · s̄`: the sigmoid's transition spans about 1/250 of the
/// typical squared approach distance.
pub const ALPHA0_SCALE: f64 = 250.0;

/// Default step length at `α₀`, in units of `√s̄`.
pub const LR_SCALE: f64 = 0.1;

/// Median over trajectories of `|min_sq_dist − ε²|` for `region`, floored
/// at `bounds.min²`: the typical magnitude of the sigmoid's argument.
pub fn typical_sq_dist(dataset: &Dataset, region: &Region, bounds: RadiusBounds) -> f64 {
    let r2 = region.radius * region.radius;
    let mut d: Vec<f64> = dataset
        .trajectories()
        .iter()
        .map(|t| (crate::trajectory::min_sq_dist_unchecked(t, &region.center).0 - r2).abs())
        .collect();
    d.sort_by(f64::total_cmp);
    let n = d.len();
    let med = if n % 2 == 1 {
        d[n / 2]
    } else {
        0.5 * (d[n / 2 - 1] + d[n / 2])
    };
    med.max(bounds.min * bounds.min)
}

impl OptimConfig {
    /// Resolve data-dependent defaults around an initial region.
    pub fn resolve(
        &self,
        dataset: &Dataset,
        init: &Region,
        bounds: RadiusBounds,
    ) -> Result<OptimSettings> {
        dataset.check_center(&init.center)?;
        let s = typical_sq_dist(dataset, init, bounds);
        let max_steps = self.max_steps.max(1);
        let settings = OptimSettings {
            schedule: AnnealSchedule {
                alpha0: self.alpha0.unwrap_or(ALPHA0_SCALE / s),
                growth: self.growth,
                period: self.period.unwrap_or((max_steps / 8).max(1)),
                alpha_max: self.alpha_max.unwrap_or(1e4 / s),
            },
            lr: self.lr.unwrap_or(LR_SCALE * s.sqrt()),
            max_steps,
            tol: self.tol,
            momentum: self.momentum,
            bounds,
        };
        settings.validate()?;
        Ok(settings)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub alpha: f64,
    pub h_soft: f64,
    pub h_hard: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimTrace {
    pub steps: Vec<TraceStep>,
}

impl OptimTrace {
    /// CSV with columns `step,alpha,h_soft,h_hard,radius,grad_norm,c1..cd`.
    pub fn to_csv(&self) -> String {
        let d = self.steps.first().map_or(0, |s| s.center.len());
        let mut out = String::from("step,alpha,h_soft,h_hard,radius,grad_norm");
        for j in 1..=d {
            out.push_str(&format!(",c{j}"));
        }
        out.push('\n');
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                s.step, s.alpha, s.h_soft, s.h_hard, s.radius, s.grad_norm
            ));
            for c in &s.center {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimOutcome {
    /// Iterate with the lowest hard entropy; earliest wins ties.
    pub best: Region,
    pub best_h_hard: f64,
    pub best_step: usize,
    pub trace: OptimTrace,
    pub settings: OptimSettings,
}

/// Minimize the relaxed objective for one free region.
///
/// Each step moves `(C, ε)` a distance `lr · √(α₀/α)` along the negative
/// normalized gradient (with optional momentum), then projects `ε` into
/// the radius bounds. The stability stop is armed for the second half of
/// the step budget: it fires once the hard entropy has varied by less than
/// `tol` across a full anneal period.
pub fn optimize_with(
    objective: &Objective<'_>,
    init: &Region,
    settings: &OptimSettings,
) -> Result<OptimOutcome> {
    settings.validate()?;
    let dataset = objective.dataset();
    dataset.check_center(&init.center)?;
    if !settings.bounds.contains(init.radius) {
        return Err(Error::InvalidParameter(format!(
            "initial radius {} outside [{}, {}]",
            init.radius, settings.bounds.min, settings.bounds.max
        )));
    }
    if objective.reward_entropy() <= 0.0 {
        return Err(Error::DegenerateLabels);
    }

    let dim = dataset.dim();
    let sched = settings.schedule;
    let period = sched.period;
    let mut center = init.center.clone();
    let mut radius = init.radius;
    let mut velocity = vec![0.0; dim + 1];
    let mut trace = OptimTrace::default();
    let mut best = (f64::INFINITY, 0usize, init.clone());

    for step in 0..=settings.max_steps {
        let alpha = sched.alpha_at(step);
        let region = Region {
            center: center.clone(),
            radius,
        };
        let app = objective.approaches(&center);
        let ev = objective.evaluate_from(&region, alpha, &app);
        let h_hard = objective.hard_entropy_from(radius, &app);
        let grad_norm = (ev.grad_center.iter().map(|g| g * g).sum::<f64>()
            + ev.grad_radius * ev.grad_radius)
            .sqrt();
        trace.steps.push(TraceStep {
            step,
            alpha,
            h_soft: ev.value,
            h_hard,
            center: center.clone(),
            radius,
            grad_norm,
        });
        if !grad_norm.is_finite() || !ev.value.is_finite() {
            return Err(Error::NonFiniteGradient {
                step,
                trace: Box::new(trace),
            });
        }
        if h_hard < best.0 {
            best = (h_hard, step, region);
        }
        if step == settings.max_steps {
            break;
        }
        if step >= settings.max_steps / 2 && step >= period && step % period == 0 {
            let window = &trace.steps[step - period..=step];
            let (lo, hi) = window
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s.h_hard), hi.max(s.h_hard))
                });
            if hi - lo < settings.tol {
                break;
            }
        }

        if grad_norm > 0.0 {
            let eta = settings.lr * (sched.alpha0 / alpha).sqrt();
            for (j, g) in ev.grad_center.iter().enumerate() {
                velocity[j] = settings.momentum * velocity[j] + g / grad_norm;
            }
            velocity[dim] = settings.momentum * velocity[dim] + ev.grad_radius / grad_norm;
            for (c, v) in center.iter_mut().zip(&velocity) {
                *c -= eta * v;
            }
            radius = settings.bounds.project(radius - eta * velocity[dim]);
        }
    }

    Ok(OptimOutcome {
        best: best.2,
        best_h_hard: best.0,
        best_step: best.1,
        trace,
        settings: settings.clone(),
    })
}

/// Resolve settings from `config` and optimize one region on top of `frozen`.
pub fn optimize_region(
    dataset: &Dataset,
    labels: &RewardAlphabet,
    frozen: &[Region],
    init: &Region,
    config: &OptimConfig,
) -> Result<OptimOutcome> {
    let objective = Objective::new(dataset, labels, frozen)?;
    let settings = config.resolve(dataset, init, dataset.radius_bounds())?;
    optimize_with(&objective, init, &settings)
}
