//! Two-stage discovery on the door task, where reward needs a visit to both
//! the key and the door region. Compares each stage to the grid oracle.
//!
//! `cargo run --release --example door_discovery -- [seed]`

use trajregions::prelude::*;

fn main() -> Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let (data, truth) = synth::gen_door(&TaskSpec::door(2, seed))?;
    let labels = discretize_rewards(&data.rewards(), 2)?;
    println!("success fraction {:.3}", truth.success_fraction);

    let single = grid_search_default(&data, &labels, &[])?;
    println!("best single region (oracle): H = {:.4} nats", single.h_hard);

    let config = DiscoveryConfig {
        m: 2,
        n_restart: 8,
        seed,
        ..Default::default()
    };
    let report = discover(&data, &labels, &config)?;
    print!("{}", report.table());
    for (i, r) in report.regions.iter().enumerate() {
        println!(
            "region {}: center {:.3?} radius {:.3}",
            i + 1,
            r.center,
            r.radius
        );
    }
    for (i, r) in truth.regions.iter().enumerate() {
        println!(
            "planted {}: center {:.3?} radius {:.3}",
            i + 1,
            r.center,
            r.radius
        );
    }
    Ok(())
}
