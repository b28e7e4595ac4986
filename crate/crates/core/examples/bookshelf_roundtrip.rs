//! Reads a Bookshelf benchmark (or writes a synthetic one first) and
//! prints its size, then writes the stored placement back out.
//!
//! ```text
//! cargo run --example bookshelf_roundtrip -- [design.aux]
//! ```

use std::path::PathBuf;

use spectral_placer::model::bookshelf::{parse_bookshelf, write_bookshelf, write_pl};
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};

fn main() -> spectral_placer::Result<()> {
    let out_dir = std::env::temp_dir().join("spectral-placer-bookshelf");
    let aux = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let d = synthesize_instance(300, 1, &SynthConfig::default())?;
            write_bookshelf(&out_dir, "synth300", &d.netlist, &d.region, &d.placement)?
        }
    };

    let d = parse_bookshelf(&aux)?;
    let nl = &d.netlist;
    println!("{}", aux.display());
    println!(
        "  {} nodes ({} movable, {} fixed), {} nets, {} pins",
        nl.nodes.len(),
        nl.num_movable(),
        nl.fixed().len(),
        nl.nets.len(),
        nl.pins.len()
    );
    let bb = d.region.bbox;
    println!(
        "  {} rows, region {:.0} x {:.0}, site {}",
        d.region.rows.len(),
        bb.width(),
        bb.height(),
        d.region.site_width()
    );

    let pl = out_dir.join("copy.pl");
    write_pl(&d.placement, nl, &pl)?;
    println!("wrote {}", pl.display());
    Ok(())
}
