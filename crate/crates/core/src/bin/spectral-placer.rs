use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use spectral_placer::flow::{self, InputSpec, RunConfig, Stage};

/// Place a Bookshelf design or a synthetic netlist and report metrics.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Bookshelf .aux file.
    #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
    aux: Option<PathBuf>,
    /// Synthetic instance, `m=CELLS,ws=WHITESPACE`.
    #[arg(long)]
    synth: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    target_density: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Grid dimension (power of two); derived from the cell count if absent.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out_pl: Option<PathBuf>,
    /// Per-iteration trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Metrics JSON; printed to stdout when absent.
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    #[arg(long, value_parser = ["init", "global", "legal"], default_value = "legal")]
    stop_after: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();

    let (input, raw) = match (&args.aux, &args.synth) {
        (Some(p), _) => (Ok(InputSpec::Aux(p.clone())), p.display().to_string()),
        (None, Some(s)) => (s.parse::<InputSpec>(), format!("synth:{s}")),
        (None, None) => unreachable!("clap requires one input"),
    };
    let placeholder = InputSpec::Synth {
        m: 1,
        whitespace: 0.5,
    };
    let mut config = RunConfig::new(input.as_ref().map_or(placeholder, Clone::clone));
    config.target_density = args.target_density;
    config.max_iters = args.max_iters;
    config.grid = args.grid;
    config.seed = args.seed;
    config.out_pl = args.out_pl;
    config.trace = args.trace;
    config.metrics = args.metrics.clone();
    config.svg_dir = args.svg_dir;
    config.stop_after = args.stop_after.parse::<Stage>().expect("validated by clap");

    let metrics = match input {
        Ok(_) => flow::run(&config),
        Err(e) => {
            let mut m = flow::Metrics::failed(&config, &e);
            m.input = raw;
            if let Some(path) = &config.metrics {
                let _ = flow::write_metrics(&m, path);
            }
            m
        }
    };
    if args.metrics.is_none() || !metrics.is_ok() {
        println!("{}", metrics.to_json());
    }
    if let Some(err) = &metrics.error {
        eprintln!("error: {}", err.message);
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
