//! Quadratic initial placement, one line per re-linearization round.
//!
//! ```text
//! cargo run --example initial_placement -- [cells]
//! FFTPL_THREADS=2 cargo run --example initial_placement
//! ```

use spectral_placer::initial::{initial_place_with_report, thread_count};
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};
use spectral_placer::wirelength::hpwl;

fn main() -> spectral_placer::Result<()> {
    let m: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2000);
    let d = synthesize_instance(m, 1, &SynthConfig::default())?;
    let start = std::time::Instant::now();
    let (p, report) = initial_place_with_report(&d.netlist, &d.region);
    let elapsed = start.elapsed();
    for (r, s) in report.rounds.iter().enumerate() {
        println!(
            "round {r}  quadratic {:.4e} -> {:.4e}  max move {:.3}  cg iters {}",
            s.quad_before, s.quad_after, s.max_move, s.cg_iters
        );
    }
    println!(
        "hpwl {:.4e}, {} floating cells, {:.2?} on {} thread(s)",
        hpwl(&d.netlist, &p)?.total,
        report.floating,
        elapsed,
        thread_count()
    );
    Ok(())
}
