//! Exhaustive grid search over (state, radius) candidates, the reference
//! that gradient-based discovery is measured against.
//!
//! `cargo run --example oracle_grid`

use trajregions::oracle::{default_centers, geometric_radii};
use trajregions::prelude::*;

fn main() -> Result<()> {
    let mut spec = TaskSpec::paint(2, 11);
    spec.n_traj = 30;
    let (data, _) = synth::generate(&spec)?;
    let labels = discretize_rewards(&data.rewards(), 2)?;

    let centers = default_centers(&data);
    let radii = geometric_radii(data.radius_bounds(), 8);
    let oracle = grid_search(&data, &labels, &[], &centers, &radii)?;
    println!("{} centers x {} radii", centers.len(), radii.len());
    println!(
        "best H = {:.4} nats at center {:.3?} radius {:.4}",
        oracle.h_hard, oracle.best.center, oracle.best.radius
    );

    let report = discover(&data, &labels, &DiscoveryConfig::default())?;
    println!("discovery H = {:.4} nats", report.final_entropy);
    Ok(())
}
