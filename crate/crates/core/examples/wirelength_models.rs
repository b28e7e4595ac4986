//! Exact HPWL against the weighted-average smoothing as gamma shrinks.
//!
//! ```text
//! cargo run --example wirelength_models
//! ```

use spectral_placer::initial::initial_place;
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};
use spectral_placer::wirelength::{hpwl, wa_wirelength};

fn main() -> spectral_placer::Result<()> {
    let d = synthesize_instance(500, 2, &SynthConfig::default())?;
    let p = initial_place(&d.netlist, &d.region);
    let exact = hpwl(&d.netlist, &p)?.total;
    println!("hpwl {exact:.4e}");
    for gamma in [100.0, 30.0, 10.0, 3.0, 1.0, 0.3] {
        let wa = wa_wirelength(&d.netlist, &p, gamma)?;
        let (gx, gy) = wa.gradient.expect("gradient");
        let gnorm = gx.iter().chain(&gy).map(|g| g * g).sum::<f64>().sqrt();
        println!(
            "gamma {gamma:6.1}  wa {:.4e}  ratio {:.4}  |grad| {gnorm:.3e}",
            wa.total,
            wa.total / exact
        );
    }
    Ok(())
}
