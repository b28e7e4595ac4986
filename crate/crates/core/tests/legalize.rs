mod common;

use spectral_placer::engine::{global_place, GlobalConfig};
use spectral_placer::initial::initial_place;
use spectral_placer::legalize::{check_legality, greedy_improve, legalize, random_legal_placement};
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};
use spectral_placer::wirelength::hpwl;

/// Legalize and improve, asserting legality of both and HPWL non-increase.
fn check_pipeline(
    d: &spectral_placer::model::bookshelf::Design,
    p: &spectral_placer::model::PlacementState,
) {
    let nl = &d.netlist;
    let legal = legalize(p, nl, &d.region).unwrap();
    let rep = check_legality(nl, &d.region, &legal.placement);
    assert!(
        rep.is_legal(),
        "{:?}",
        &rep.violations[..rep.violations.len().min(5)]
    );
    let before = hpwl(nl, &legal.placement).unwrap().total;
    let improved = greedy_improve(&legal, nl, &d.region, 4);
    assert!(check_legality(nl, &d.region, &improved.placement).is_legal());
    let after = hpwl(nl, &improved.placement).unwrap().total;
    assert!(after <= before + 1e-9, "{before} -> {after}");
}

#[test]
fn initial_placements_legalize() {
    for (m, seed) in [(100, 1), (300, 2), (800, 3)] {
        let d = common::synth(m, seed);
        check_pipeline(&d, &initial_place(&d.netlist, &d.region));
    }
}

#[test]
fn global_placements_legalize() {
    let d = common::synth(600, 4);
    let init = initial_place(&d.netlist, &d.region);
    let g = global_place(&d.netlist, &d.region, &init, &GlobalConfig::default()).unwrap();
    check_pipeline(&d, &g.movable_placement());
}

#[test]
fn notched_and_tight_regions() {
    let tight = SynthConfig {
        whitespace: 0.1,
        notch: true,
        ..SynthConfig::default()
    };
    let d = synthesize_instance(400, 5, &tight).unwrap();
    check_pipeline(&d, &initial_place(&d.netlist, &d.region));
}

#[test]
fn random_legal_placements_are_legal() {
    for seed in 0..3 {
        let d = common::synth(300, 6);
        let r = random_legal_placement(&d.netlist, &d.region, seed).unwrap();
        assert!(check_legality(&d.netlist, &d.region, &r.placement).is_legal());
    }
}
