//! Recover the single planted region of a paint task.
//!
//! `cargo run --example paint_discovery -- [seed]`

use trajregions::eval::evaluate;
use trajregions::prelude::*;

fn main() -> Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let (data, truth) = synth::gen_paint(&TaskSpec::paint(2, seed))?;
    let labels = discretize_rewards(&data.rewards(), 2)?;
    let config = DiscoveryConfig {
        m: 1,
        n_restart: 8,
        seed,
        ..Default::default()
    };
    let report = discover(&data, &labels, &config)?;
    print!("{}", report.table());

    let planted = &truth.regions[0];
    let found = &report.regions[0];
    println!(
        "planted  center {:.3?} radius {:.3}",
        planted.center, planted.radius
    );
    println!(
        "found    center {:.3?} radius {:.3}",
        found.center, found.radius
    );
    let summary = evaluate(&data, &labels, &report.regions, Some(&truth))?;
    println!("accuracy {:.3}", summary.accuracy);
    Ok(())
}
