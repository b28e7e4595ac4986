mod common;

use spectral_placer::initial::{initial_place, initial_place_with_report};

#[test]
fn solution_stays_in_pin_hull() {
    let d = common::synth(300, 41);
    let nl = &d.netlist;
    let m = nl.num_movable();
    let fixed_pins: Vec<(f64, f64)> = nl
        .pins
        .iter()
        .filter(|p| p.node >= m)
        .map(|p| nl.pin_position(p, &nl.stored_placement()))
        .collect();
    let lo_x = fixed_pins.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi_x = fixed_pins
        .iter()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let lo_y = fixed_pins.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi_y = fixed_pins
        .iter()
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let site = d.region.site_width();
    let (p, report) = initial_place_with_report(nl, &d.region);
    assert_eq!(report.floating, 0);
    for i in 0..m {
        assert!(
            p.x[i] >= lo_x - site && p.x[i] <= hi_x + site,
            "x[{i}] = {}",
            p.x[i]
        );
        assert!(
            p.y[i] >= lo_y - site && p.y[i] <= hi_y + site,
            "y[{i}] = {}",
            p.y[i]
        );
    }
}

#[test]
fn every_round_lowers_its_quadratic() {
    let d = common::synth(500, 42);
    let (_, report) = initial_place_with_report(&d.netlist, &d.region);
    assert!(!report.rounds.is_empty());
    for (r, s) in report.rounds.iter().enumerate() {
        assert!(
            s.quad_after <= s.quad_before * (1.0 + 1e-9) + 1e-9,
            "round {r}: {} -> {}",
            s.quad_before,
            s.quad_after
        );
    }
}

#[test]
fn deterministic() {
    let d = common::synth(400, 43);
    assert_eq!(
        initial_place(&d.netlist, &d.region),
        initial_place(&d.netlist, &d.region)
    );
}

#[test]
fn placement_inside_region() {
    let d = common::synth(400, 44);
    let p = initial_place(&d.netlist, &d.region);
    let bb = d.region.bbox;
    for (i, n) in d.netlist.movable().iter().enumerate() {
        assert!(
            p.x[i] - n.width / 2.0 >= bb.x_lo - 1e-9 && p.x[i] + n.width / 2.0 <= bb.x_hi + 1e-9
        );
        assert!(
            p.y[i] - n.height / 2.0 >= bb.y_lo - 1e-9 && p.y[i] + n.height / 2.0 <= bb.y_hi + 1e-9
        );
    }
}
