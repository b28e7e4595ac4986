//! End-to-end flow: read or synthesize a design, place it, legalize it,
//! and report metrics.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::{self, GlobalConfig, GlobalResult};
use crate::error::{PlaceError, Result};
use crate::legalize::{self, RowAssignment};
use crate::model::bookshelf::{self, Design};
use crate::model::synth::{self, SynthConfig};
use crate::model::PlacementState;
use crate::{figures, initial, wirelength};

pub const IMPROVE_PASSES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    Aux(PathBuf),
    Synth { m: usize, whitespace: f64 },
}

impl FromStr for InputSpec {
    type Err = PlaceError;

    /// Parses the synthetic form `m=K,ws=F` (`ws` optional, default 0.5).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| PlaceError::InvalidArgument(format!("synthetic spec `{s}`: {msg}"));
        let mut m = None;
        let mut ws = 0.5;
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            match k.trim() {
                "m" => m = Some(v.trim().parse::<usize>().map_err(|_| bad("bad m"))?),
                "ws" => ws = v.trim().parse::<f64>().map_err(|_| bad("bad ws"))?,
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let m = m.ok_or_else(|| bad("missing m"))?;
        if m == 0 {
            return Err(bad("m must be positive"));
        }
        if !(ws > 0.0 && ws < 1.0) {
            return Err(bad("ws must be in (0, 1)"));
        }
        Ok(InputSpec::Synth { m, whitespace: ws })
    }
}

impl std::fmt::Display for InputSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputSpec::Aux(p) => write!(f, "{}", p.display()),
            InputSpec::Synth { m, whitespace } => write!(f, "synth:m={m},ws={whitespace}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Init,
    Global,
    #[default]
    Legal,
}

impl FromStr for Stage {
    type Err = PlaceError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "init" => Ok(Stage::Init),
            "global" => Ok(Stage::Global),
            "legal" => Ok(Stage::Legal),
            _ => Err(PlaceError::InvalidArgument(format!(
                "unknown stage `{s}` (expected init, global or legal)"
            ))),
        }
    }
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Init => "init",
            Stage::Global => "global",
            Stage::Legal => "legal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSpec,
    pub target_density: f64,
    pub max_iters: usize,
    pub grid: Option<usize>,
    pub seed: u64,
    pub out_pl: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    pub svg_dir: Option<PathBuf>,
    /// Iterations to draw heatmaps for; the last iteration is always added
    /// when figures are requested.
    pub snapshot_iters: Vec<usize>,
    pub stop_after: Stage,
}

impl RunConfig {
    pub fn new(input: InputSpec) -> Self {
        RunConfig {
            input,
            target_density: 1.0,
            max_iters: 1000,
            grid: None,
            seed: 1,
            out_pl: None,
            trace: None,
            metrics: None,
            svg_dir: None,
            snapshot_iters: vec![0],
            stop_after: Stage::Legal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_density > 0.0 && self.target_density <= 1.0) {
            return Err(PlaceError::InvalidArgument(format!(
                "target density {} outside (0, 1]",
                self.target_density
            )));
        }
        if self.max_iters == 0 {
            return Err(PlaceError::InvalidArgument(
                "max_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn global_config(&self) -> GlobalConfig {
        GlobalConfig {
            target_density: self.target_density,
            max_iters: self.max_iters,
            grid: self.grid,
            seed: self.seed,
            snapshot_iters: if self.svg_dir.is_some() {
                self.snapshot_iters.clone()
            } else {
                Vec::new()
            },
            snapshot_final: self.svg_dir.is_some(),
            trace_path: self.trace.clone(),
            ..GlobalConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub load: f64,
    pub initial: f64,
    pub global: f64,
    pub legalize: f64,
    pub improve: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSummary {
    pub first: f64,
    pub min: f64,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorField {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub schema_version: u32,
    pub input: String,
    pub stop_after: String,
    pub seed: u64,
    pub target_density: f64,
    pub cells: usize,
    pub fixed: usize,
    pub nets: usize,
    pub pins: usize,
    pub fillers: usize,
    pub grid: usize,
    pub iterations: usize,
    pub converged: Option<bool>,
    pub tau: Option<TauSummary>,
    pub hpwl_initial: Option<f64>,
    pub hpwl_global: Option<f64>,
    pub hpwl_legal: Option<f64>,
    /// HPWL of the written placement.
    pub hpwl_final: Option<f64>,
    pub displacement: Option<f64>,
    pub legal: Option<bool>,
    pub timings: Timings,
    pub error: Option<ErrorField>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl Metrics {
    /// Metrics with only the configuration fields filled in.
    pub fn empty(config: &RunConfig) -> Self {
        Metrics {
            schema_version: SCHEMA_VERSION,
            input: config.input.to_string(),
            stop_after: config.stop_after.name().into(),
            seed: config.seed,
            target_density: config.target_density,
            cells: 0,
            fixed: 0,
            nets: 0,
            pins: 0,
            fillers: 0,
            grid: 0,
            iterations: 0,
            converged: None,
            tau: None,
            hpwl_initial: None,
            hpwl_global: None,
            hpwl_legal: None,
            hpwl_final: None,
            displacement: None,
            legal: None,
            timings: Timings::default(),
            error: None,
        }
    }

    pub fn failed(config: &RunConfig, err: &PlaceError) -> Self {
        Metrics {
            error: Some(ErrorField {
                kind: err.kind().into(),
                message: err.to_string(),
            }),
            ..Metrics::empty(config)
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }

    /// JSON with the wall-clock fields removed, for reproducibility checks.
    pub fn to_json_without_timings(&self) -> String {
        let mut v = serde_json::to_value(self).expect("metrics serialize");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("metrics serialize")
    }
}

#[derive(Clone, Copy)]
enum Ty {
    Int,
    Num,
    Str,
    Bool,
    Obj(&'static [(&'static str, Ty, bool)]),
}

const TAU_SCHEMA: &[(&str, Ty, bool)] = &[
    ("first", Ty::Num, false),
    ("min", Ty::Num, false),
    ("last", Ty::Num, false),
];
const TIMING_SCHEMA: &[(&str, Ty, bool)] = &[
    ("load", Ty::Num, false),
    ("initial", Ty::Num, false),
    ("global", Ty::Num, false),
    ("legalize", Ty::Num, false),
    ("improve", Ty::Num, false),
    ("total", Ty::Num, false),
];
const ERROR_SCHEMA: &[(&str, Ty, bool)] = &[("kind", Ty::Str, false), ("message", Ty::Str, false)];
/// `(field, type, nullable)`; every field is required.
const METRICS_SCHEMA: &[(&str, Ty, bool)] = &[
    ("schema_version", Ty::Int, false),
    ("input", Ty::Str, false),
    ("stop_after", Ty::Str, false),
    ("seed", Ty::Int, false),
    ("target_density", Ty::Num, false),
    ("cells", Ty::Int, false),
    ("fixed", Ty::Int, false),
    ("nets", Ty::Int, false),
    ("pins", Ty::Int, false),
    ("fillers", Ty::Int, false),
    ("grid", Ty::Int, false),
    ("iterations", Ty::Int, false),
    ("converged", Ty::Bool, true),
    ("tau", Ty::Obj(TAU_SCHEMA), true),
    ("hpwl_initial", Ty::Num, true),
    ("hpwl_global", Ty::Num, true),
    ("hpwl_legal", Ty::Num, true),
    ("hpwl_final", Ty::Num, true),
    ("displacement", Ty::Num, true),
    ("legal", Ty::Bool, true),
    ("timings", Ty::Obj(TIMING_SCHEMA), false),
    ("error", Ty::Obj(ERROR_SCHEMA), true),
];

fn check_object(v: &Value, schema: &[(&str, Ty, bool)], path: &str, errs: &mut Vec<String>) {
    let Some(obj) = v.as_object() else {
        errs.push(format!("{path}: expected object"));
        return;
    };
    for key in obj.keys() {
        if !schema.iter().any(|(k, _, _)| k == key) {
            errs.push(format!("{path}.{key}: unexpected field"));
        }
    }
    for &(key, ty, nullable) in schema {
        let p = format!("{path}.{key}");
        let Some(val) = obj.get(key) else {
            errs.push(format!("{p}: missing"));
            continue;
        };
        if val.is_null() {
            if !nullable {
                errs.push(format!("{p}: null not allowed"));
            }
            continue;
        }
        let ok = match ty {
            Ty::Int => val.is_u64(),
            Ty::Num => val.is_number(),
            Ty::Str => val.is_string(),
            Ty::Bool => val.is_boolean(),
            Ty::Obj(inner) => {
                check_object(val, inner, &p, errs);
                true
            }
        };
        if !ok {
            errs.push(format!("{p}: wrong type"));
        }
    }
}

/// Checks a metrics document against the embedded schema.
pub fn validate_metrics(v: &Value) -> std::result::Result<(), Vec<String>> {
    let mut errs = Vec::new();
    check_object(v, METRICS_SCHEMA, "$", &mut errs);
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// Everything a run produced, for callers that want more than metrics.
#[derive(Debug, Clone)]
pub struct FlowOutput {
    pub design: Design,
    pub initial: PlacementState,
    pub global: Option<GlobalResult>,
    pub legal: Option<RowAssignment>,
    pub improved: Option<RowAssignment>,
    pub metrics: Metrics,
}

pub fn load_design(input: &InputSpec, seed: u64) -> Result<Design> {
    match input {
        InputSpec::Aux(path) => bookshelf::parse_bookshelf(path),
        InputSpec::Synth { m, whitespace } => synth::synthesize_instance(
            *m,
            seed,
            &SynthConfig {
                whitespace: *whitespace,
                ..SynthConfig::default()
            },
        ),
    }
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

/// Runs the configured stages and writes the requested outputs.
pub fn run_flow(config: &RunConfig) -> Result<FlowOutput> {
    let mut metrics = Metrics::empty(config);
    run_stages(config, &mut metrics)
}

fn run_stages(config: &RunConfig, metrics: &mut Metrics) -> Result<FlowOutput> {
    config.validate()?;
    let total = Instant::now();

    let t = Instant::now();
    let design = load_design(&config.input, config.seed)?;
    design.netlist.validate()?;
    metrics.timings.load = secs(t);
    let nl = &design.netlist;
    metrics.cells = nl.num_movable();
    metrics.fixed = nl.fixed().len();
    metrics.nets = nl.nets.len();
    metrics.pins = nl.pins.len();
    info!(
        "{}: {} movable, {} fixed, {} nets",
        metrics.input, metrics.cells, metrics.fixed, metrics.nets
    );

    let t = Instant::now();
    let init = initial::initial_place(nl, &design.region);
    metrics.timings.initial = secs(t);
    metrics.hpwl_initial = Some(wirelength::hpwl(nl, &init)?.total);

    let mut out = FlowOutput {
        design: design.clone(),
        initial: init,
        global: None,
        legal: None,
        improved: None,
        metrics: metrics.clone(),
    };
    let mut written = out.initial.clone();

    if config.stop_after != Stage::Init {
        let t = Instant::now();
        let g = engine::global_place(nl, &design.region, &out.initial, &config.global_config())?;
        metrics.timings.global = secs(t);
        metrics.fillers = g.fillers.len();
        metrics.grid = g.geom.n;
        metrics.iterations = g.trace.len();
        metrics.converged = Some(g.converged);
        if let (Some(first), Some(last)) = (g.trace.first(), g.trace.last()) {
            metrics.tau = Some(TauSummary {
                first: first.tau,
                min: g.trace.iter().map(|t| t.tau).fold(f64::INFINITY, f64::min),
                last: last.tau,
            });
        }
        let gp = g.movable_placement();
        metrics.hpwl_global = Some(wirelength::hpwl(nl, &gp)?.total);
        written = gp.clone();

        if let Some(dir) = &config.svg_dir {
            figures::emit_figures(&g.trace, &g.snapshots, dir)?;
        }

        if config.stop_after == Stage::Legal {
            let t = Instant::now();
            let legal = legalize::legalize(&gp, nl, &design.region)?;
            metrics.timings.legalize = secs(t);
            metrics.hpwl_legal = Some(wirelength::hpwl(nl, &legal.placement)?.total);
            metrics.displacement = Some(legal.total_displacement());

            let t = Instant::now();
            let improved = legalize::greedy_improve(&legal, nl, &design.region, IMPROVE_PASSES);
            metrics.timings.improve = secs(t);
            metrics.legal =
                Some(legalize::check_legality(nl, &design.region, &improved.placement).is_legal());
            written = improved.placement.clone();
            out.legal = Some(legal);
            out.improved = Some(improved);
        }
        out.global = Some(g);
    }
    metrics.hpwl_final = Some(wirelength::hpwl(nl, &written)?.total);
    if let Some(path) = &config.out_pl {
        bookshelf::write_pl(&written, nl, path)?;
    }
    metrics.timings.total = secs(total);
    out.metrics = metrics.clone();
    Ok(out)
}

/// Runs the flow and always returns metrics; failures land in the `error`
/// field. Metrics are also written to `config.metrics` when set.
pub fn run(config: &RunConfig) -> Metrics {
    let mut metrics = Metrics::empty(config);
    if let Err(e) = run_stages(config, &mut metrics) {
        metrics.error = Some(ErrorField {
            kind: e.kind().into(),
            message: e.to_string(),
        });
    }
    if let Some(path) = &config.metrics {
        if let Err(e) = write_metrics(&metrics, path) {
            if metrics.error.is_none() {
                metrics.error = Some(ErrorField {
                    kind: e.kind().into(),
                    message: e.to_string(),
                });
            }
        }
    }
    metrics
}

pub fn write_metrics(metrics: &Metrics, path: &Path) -> Result<()> {
    std::fs::write(path, metrics.to_json() + "\n").map_err(|e| PlaceError::io(path, e))
}
