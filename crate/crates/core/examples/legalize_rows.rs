//! Legalizes a global placement, runs the greedy improver and compares
//! against a random legal placement.
//!
//! ```text
//! cargo run --example legalize_rows -- [cells]
//! ```

use spectral_placer::engine::{global_place, GlobalConfig};
use spectral_placer::initial::initial_place;
use spectral_placer::legalize::{check_legality, greedy_improve, legalize, random_legal_placement};
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};
use spectral_placer::wirelength::hpwl;

fn main() -> spectral_placer::Result<()> {
    let m: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1000);
    let d = synthesize_instance(m, 1, &SynthConfig::default())?;
    let nl = &d.netlist;
    let init = initial_place(nl, &d.region);
    let g = global_place(nl, &d.region, &init, &GlobalConfig::default())?;
    let gp = g.movable_placement();

    let legal = legalize(&gp, nl, &d.region)?;
    let improved = greedy_improve(&legal, nl, &d.region, 4);
    let random = random_legal_placement(nl, &d.region, 1)?;
    let report = check_legality(nl, &d.region, &improved.placement);

    println!("global     hpwl {:.4e}", hpwl(nl, &gp)?.total);
    println!(
        "legalized  hpwl {:.4e}  displacement {:.4e}",
        hpwl(nl, &legal.placement)?.total,
        legal.total_displacement()
    );
    println!(
        "improved   hpwl {:.4e}  legal {}",
        hpwl(nl, &improved.placement)?.total,
        report.is_legal()
    );
    println!("random     hpwl {:.4e}", hpwl(nl, &random.placement)?.total);
    Ok(())
}
