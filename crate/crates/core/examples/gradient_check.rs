//! Analytic gradient of the relaxed objective next to central differences.
//!
//! `cargo run --example gradient_check`

use trajregions::prelude::*;

fn main() -> Result<()> {
    let (data, _) = synth::gen_paint(&TaskSpec::paint(2, 2))?;
    let labels = discretize_rewards(&data.rewards(), 2)?;
    let region = Region::new(vec![0.45, 0.55], 0.12)?;
    let h = 1e-5;

    for alpha in [10.0, 100.0, 1000.0] {
        let eval = objective_with_gradient(&data, &labels, &[], &region, alpha)?;
        let f =
            |r: &Region| objective_with_gradient(&data, &labels, &[], r, alpha).map(|e| e.value);
        let mut numeric = Vec::new();
        for j in 0..=region.center.len() {
            let (mut plus, mut minus) = (region.clone(), region.clone());
            if j < region.center.len() {
                plus.center[j] += h;
                minus.center[j] -= h;
            } else {
                plus.radius += h;
                minus.radius -= h;
            }
            numeric.push((f(&plus)? - f(&minus)?) / (2.0 * h));
        }
        println!("alpha {alpha:>6}: H_soft {:.5}", eval.value);
        println!(
            "  analytic dC {:+.5?} dε {:+.5}",
            eval.grad_center, eval.grad_radius
        );
        println!("  numeric  dC {:+.5?} dε {:+.5}", &numeric[..2], numeric[2]);
    }
    Ok(())
}
