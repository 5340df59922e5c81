//! Joint tables, conditional entropy and information gain for hand-written
//! memberships.
//!
//! `cargo run --example entropy_basics`

use trajregions::entropy::to_bits;
use trajregions::prelude::*;

fn main() -> Result<()> {
    // six trajectories, two binary memberships, binary reward
    let labels = RewardAlphabet::from_labels(vec![1, 1, 0, 0, 0, 1], 2)?;
    let rows = vec![
        vec![1.0, 1.0],
        vec![1.0, 1.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.0, 0.0],
        vec![1.0, 1.0],
    ];
    println!("H(R) = {:.4} nats", marginal_entropy(&labels));

    let first = MembershipMatrix::column(&rows.iter().map(|r| r[0]).collect::<Vec<_>>())?;
    let t1 = estimate_joint(&first, &labels)?;
    println!(
        "first region alone: H(R|M1) = {:.4} nats, IG = {:.4} bits",
        conditional_entropy(&t1),
        to_bits(information_gain(&labels, &t1))
    );

    let both = MembershipMatrix::from_rows(&rows)?;
    let t2 = estimate_joint(&both, &labels)?;
    println!(
        "both regions:       H(R|M1,M2) = {:.4} nats, IG = {:.4} bits",
        conditional_entropy(&t2),
        to_bits(information_gain(&labels, &t2))
    );

    // soft memberships give a fractional table
    let soft = MembershipMatrix::column(&[0.9, 0.8, 0.6, 0.1, 0.2, 0.7])?;
    let ts = estimate_joint(&soft, &labels)?;
    for mu in 0..ts.n_assignments() {
        println!(
            "P(M={mu}, R=0) = {:.3}  P(M={mu}, R=1) = {:.3}",
            ts.prob(mu, 0),
            ts.prob(mu, 1)
        );
    }
    Ok(())
}
