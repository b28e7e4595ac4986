mod common;

use std::fs;

use spectral_placer::engine::trace::read_jsonl;
use spectral_placer::flow::{run, validate_metrics, InputSpec, RunConfig, Stage};
use spectral_placer::model::bookshelf::{parse_bookshelf, write_bookshelf};

fn synth_config(m: usize) -> RunConfig {
    RunConfig::new(InputSpec::Synth { m, whitespace: 0.5 })
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for k in 0..2 {
        let mut c = synth_config(300);
        c.out_pl = Some(dir.path().join(format!("run{k}.pl")));
        let m = run(&c);
        assert!(m.is_ok(), "{:?}", m.error);
        outs.push((
            m.to_json_without_timings(),
            fs::read_to_string(c.out_pl.unwrap()).unwrap(),
        ));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn figures_trace_and_metrics_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = synth_config(200);
    c.svg_dir = Some(dir.path().join("svg"));
    c.trace = Some(dir.path().join("trace.jsonl"));
    c.metrics = Some(dir.path().join("metrics.json"));
    c.snapshot_iters = vec![0, 5];
    let m = run(&c);
    assert!(m.is_ok(), "{:?}", m.error);

    let svgs = fs::read_dir(dir.path().join("svg")).unwrap().count();
    // Two line charts, three heatmaps for each of k = 0, 5 and the last.
    assert_eq!(svgs, 2 + 3 * 3);

    let trace = read_jsonl(&dir.path().join("trace.jsonl")).unwrap();
    assert_eq!(trace.len(), m.iterations);

    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap())
            .unwrap();
    assert!(validate_metrics(&v).is_ok());
    assert_eq!(v["legal"], serde_json::Value::Bool(true));
}

#[test]
fn stages_stop_where_asked() {
    let mut c = synth_config(150);
    c.stop_after = Stage::Init;
    let m = run(&c);
    assert_eq!(m.iterations, 0);
    assert!(m.hpwl_global.is_none());
    c.stop_after = Stage::Global;
    let m = run(&c);
    assert!(m.iterations > 0);
    assert!(m.hpwl_legal.is_none());
}

#[test]
fn bookshelf_input_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = common::synth(250, 9);
    let aux = write_bookshelf(dir.path(), "tiny", &d.netlist, &d.region, &d.placement).unwrap();
    let back = parse_bookshelf(&aux).unwrap();
    assert_eq!(back.netlist.nodes.len(), d.netlist.nodes.len());

    let m = run(&RunConfig::new(InputSpec::Aux(aux)));
    assert!(m.is_ok(), "{:?}", m.error);
    assert_eq!(m.cells, 250);
    assert_eq!(m.legal, Some(true));
}

#[test]
fn errors_are_reported_not_raised() {
    let mut c = synth_config(100);
    c.target_density = 1.5;
    let m = run(&c);
    assert_eq!(m.error.unwrap().kind, "invalid_argument");
}
