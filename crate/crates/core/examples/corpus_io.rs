//! Write a generated corpus as line-delimited JSON and read it back.
//!
//! `cargo run --example corpus_io`

use trajregions::prelude::*;

fn main() -> Result<()> {
    let mut spec = TaskSpec::null(3, 1);
    spec.n_traj = 5;
    spec.horizon = 4;
    let (data, _) = synth::generate(&spec)?;

    let mut buf = Vec::new();
    write_corpus(&data, &mut buf)?;
    let text = String::from_utf8(buf).expect("corpus is UTF-8");
    for line in text.lines().take(3) {
        println!("{line}");
    }

    let back = read_corpus(text.as_bytes())?;
    assert_eq!(back, data);
    println!(
        "{} trajectories of dimension {} round-tripped",
        back.len(),
        back.dim()
    );
    Ok(())
}
