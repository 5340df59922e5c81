//! Kernel density over success states and the seed it proposes, before and
//! after excluding an already found region.
//!
//! `cargo run --example kde_seeding`

use trajregions::kde::scott_bandwidth;
use trajregions::prelude::*;

fn main() -> Result<()> {
    let (data, truth) = synth::gen_paint(&TaskSpec::paint(2, 5))?;
    let labels = discretize_rewards(&data.rewards(), 2)?;

    let success: Vec<Vec<f64>> = data
        .trajectories()
        .iter()
        .zip(0..)
        .filter(|(_, l)| labels.label(*l) == 1)
        .flat_map(|(t, _)| t.states.iter().map(|s| s.coords().to_vec()))
        .collect();
    let b = scott_bandwidth(&success)?;
    println!("{} success states, Scott bandwidth {b:.4}", success.len());

    let cfg = InitConfig {
        n_samples: 64,
        seed: 1,
        ..Default::default()
    };
    let seed = sample_center(&data, &labels, &[], &cfg)?;
    println!("seed center {:.3?}", seed.center);
    for c in seed.candidates.iter().take(5) {
        println!("  density {:8.3} at {:.3?}", c.density, c.state);
    }

    let excluded = sample_center(&data, &labels, &truth.regions, &cfg)?;
    println!("with the planted region excluded: {:.3?}", excluded.center);
    Ok(())
}
