//! One annealed optimization run from a poor start, printed every few steps.
//!
//! `cargo run --example annealing_trace`

use trajregions::prelude::*;

fn main() -> Result<()> {
    let (data, truth) = synth::gen_paint(&TaskSpec::paint(2, 4))?;
    let labels = discretize_rewards(&data.rewards(), 2)?;
    let init = Region::new(vec![0.5, 0.5], 0.2)?;
    let out = optimize_region(&data, &labels, &[], &init, &OptimConfig::default())?;

    let s = &out.settings.schedule;
    println!(
        "alpha0 {:.2} growth {} period {} alpha_max {:.1}",
        s.alpha0, s.growth, s.period, s.alpha_max
    );
    println!(
        "{:>5} {:>10} {:>8} {:>8} {:>7}",
        "step", "alpha", "H_soft", "H_hard", "radius"
    );
    for t in out.trace.steps.iter().step_by(25) {
        println!(
            "{:>5} {:>10.2} {:>8.4} {:>8.4} {:>7.4}",
            t.step, t.alpha, t.h_soft, t.h_hard, t.radius
        );
    }
    println!(
        "best at step {}: H {:.4}, center {:.3?} radius {:.3}",
        out.best_step, out.best_h_hard, out.best.center, out.best.radius
    );
    println!(
        "planted: center {:.3?} radius {:.3}",
        truth.regions[0].center, truth.regions[0].radius
    );
    Ok(())
}
