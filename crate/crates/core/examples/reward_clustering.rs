//! Continuous rewards reduced to a small alphabet by 1-D k-means.
//!
//! `cargo run --example reward_clustering`

use trajregions::prelude::*;

fn main() -> Result<()> {
    let rewards = [0.02, 0.05, 0.0, 0.48, 0.52, 0.55, 0.97, 1.0, 0.94, 0.5];
    for k in 1..=3 {
        let alphabet = discretize_rewards(&rewards, k)?;
        println!(
            "k = {k}: labels {:?} counts {:?} H(R) = {:.4} nats",
            (0..alphabet.len())
                .map(|l| alphabet.label(l))
                .collect::<Vec<_>>(),
            alphabet.counts(),
            marginal_entropy(&alphabet)
        );
    }
    Ok(())
}
