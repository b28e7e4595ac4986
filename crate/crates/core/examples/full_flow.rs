//! The whole flow with every output turned on: placement, trace, metrics
//! and SVG figures under a temporary directory.
//!
//! ```text
//! cargo run --example full_flow -- [out-dir]
//! ```

use std::path::PathBuf;

use spectral_placer::flow::{run, InputSpec, RunConfig};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("spectral-placer-flow"));
    let mut config = RunConfig::new(InputSpec::Synth {
        m: 1000,
        whitespace: 0.5,
    });
    config.out_pl = Some(dir.join("placed.pl"));
    config.trace = Some(dir.join("trace.jsonl"));
    config.metrics = Some(dir.join("metrics.json"));
    config.svg_dir = Some(dir.join("figures"));
    config.snapshot_iters = vec![0, 20, 50];
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("cannot create {}: {e}", dir.display());
        std::process::exit(1);
    }

    let metrics = run(&config);
    println!("{}", metrics.to_json());
    println!("outputs in {}", dir.display());
    if !metrics.is_ok() {
        std::process::exit(1);
    }
}
