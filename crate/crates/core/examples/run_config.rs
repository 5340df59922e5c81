//! Flat key/value configuration and its fully resolved rendering.
//!
//! `cargo run --example run_config`

use trajregions::prelude::*;

fn main() -> Result<()> {
    let mut config = RunConfig::default();
    config
        .apply_str("# two stages\nm = 2\nrestarts = 4\nopt.lr = 0.02\ninit.bandwidth = 0.05\n")?;
    config.set("seed", "42")?;
    print!("{}", config.render());

    match config.apply_str("opt.lr = fast\n") {
        Err(e) => println!("rejected: {} ({})", e, e.code()),
        Ok(()) => unreachable!(),
    }
    Ok(())
}
