//! Fillers, density and overflow before and after spreading.
//!
//! ```text
//! cargo run --example density_overflow -- [cells]
//! ```

use spectral_placer::density::{choose_grid_dim, insert_fillers, DensityModel};
use spectral_placer::engine::{global_place, GlobalConfig};
use spectral_placer::grid::GridGeometry;
use spectral_placer::initial::initial_place;
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};

fn main() -> spectral_placer::Result<()> {
    let m: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1000);
    let d = synthesize_instance(m, 1, &SynthConfig::default())?;
    let nl = &d.netlist;
    let fillers = insert_fillers(nl, &d.region, 1.0, 1);
    println!(
        "{} fillers of area {:.1}, total {:.4e} (movable {:.4e})",
        fillers.len(),
        fillers.nodes.first().map_or(0.0, |f| f.area()),
        fillers.total_area(),
        nl.movable_area()
    );

    let n = choose_grid_dim(m);
    let geom = GridGeometry::covering(&d.region.bbox, n);
    let model = DensityModel::new(nl, &d.region, &fillers, geom, 1.0)?;
    let init = initial_place(nl, &d.region);
    let before = model.overflow(&fillers.append_to(&init))?;
    let raw = model.rasterize(&fillers.append_to(&init))?;
    println!(
        "grid {n}x{n}, charge on grid {:.4e}, expected {:.4e}",
        raw.total_charge(),
        model.static_charge() + model.moving_charge()
    );
    println!("initial placement: tau {:.3}", before.tau);

    let g = global_place(nl, &d.region, &init, &GlobalConfig::default())?;
    let after = model.overflow(&g.placement)?;
    println!("after {} iterations: tau {:.3}", g.trace.len(), after.tau);
    Ok(())
}
