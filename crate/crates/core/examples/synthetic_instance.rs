//! Generates synthetic netlists at a few sizes and whitespace ratios and
//! prints their statistics.
//!
//! ```text
//! cargo run --example synthetic_instance
//! ```

use spectral_placer::density::whitespace_area;
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};

fn main() -> spectral_placer::Result<()> {
    for (m, ws) in [(100, 0.5), (1000, 0.5), (1000, 0.2), (5000, 0.3)] {
        let cfg = SynthConfig {
            whitespace: ws,
            ..SynthConfig::default()
        };
        let d = synthesize_instance(m, 1, &cfg)?;
        let nl = &d.netlist;
        let degree: f64 =
            nl.nets.iter().map(|n| n.degree() as f64).sum::<f64>() / nl.nets.len() as f64;
        let free = whitespace_area(nl, &d.region);
        println!(
            "m {m:5}  ws {ws:.2}  pads {:3}  nets {:5}  avg degree {degree:.2}  rows {:3}  utilization {:.3}",
            nl.fixed().len(),
            nl.nets.len(),
            d.region.rows.len(),
            nl.movable_area() / free
        );
    }
    Ok(())
}
