//! Global placement of a synthetic netlist, printing the overflow and
//! wirelength as the optimizer spreads the cells.
//!
//! ```text
//! cargo run --example global_place -- [cells] [seed]
//! ```

use spectral_placer::engine::{global_place, GlobalConfig};
use spectral_placer::initial::initial_place;
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};
use spectral_placer::wirelength::hpwl;

fn main() -> spectral_placer::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    let design = synthesize_instance(m, seed, &SynthConfig::default())?;
    let init = initial_place(&design.netlist, &design.region);
    println!("initial hpwl {:.4e}", hpwl(&design.netlist, &init)?.total);

    let start = std::time::Instant::now();
    let result = global_place(
        &design.netlist,
        &design.region,
        &init,
        &GlobalConfig::default(),
    )?;
    let elapsed = start.elapsed();

    for t in result.trace.iter().filter(|t| t.k % 25 == 0 || t.k == 1) {
        println!(
            "k {:4}  tau {:.3}  hpwl {:.4e}  wa {:.4e}  N {:.3e}  lambda {:.2e}  gamma {:.2}  alpha {:.3}",
            t.k, t.tau, t.hpwl, t.wa, t.energy, t.lambda, t.gamma, t.alpha
        );
    }
    println!(
        "{} iterations, converged {}, tau {:.4}, hpwl {:.4e}, {:.2?} ({:.2?}/iter), grid {}",
        result.trace.len(),
        result.converged,
        result.tau,
        hpwl(&design.netlist, &result.movable_placement())?.total,
        elapsed,
        elapsed / result.trace.len().max(1) as u32,
        result.geom.n
    );
    Ok(())
}
