mod common;

use spectral_placer::density::{self, DensityModel};
use spectral_placer::grid::GridGeometry;
use spectral_placer::initial::initial_place;
use spectral_placer::poisson::solve;

#[test]
fn charge_is_conserved() {
    for (m, n) in [(200, 16), (200, 32), (500, 8)] {
        let d = common::synth(m, 31);
        let fillers = density::insert_fillers(&d.netlist, &d.region, 1.0, 2);
        let geom = GridGeometry::covering(&d.region.bbox, n);
        let model = DensityModel::new(&d.netlist, &d.region, &fillers, geom, 1.0).unwrap();
        let p = fillers.append_to(&initial_place(&d.netlist, &d.region));
        let raw = model.rasterize(&p).unwrap();
        let want = model.static_charge() + model.moving_charge();
        let got = raw.total_charge();
        assert!(
            (got - want).abs() <= 1e-6 * want,
            "m = {m}, n = {n}: {got} vs {want}"
        );
    }
}

#[test]
fn energy_equals_grid_inner_product() {
    let d = common::synth(200, 32);
    let fillers = density::insert_fillers(&d.netlist, &d.region, 1.0, 2);
    let geom = GridGeometry::covering(&d.region.bbox, 16);
    let model = DensityModel::new(&d.netlist, &d.region, &fillers, geom, 1.0).unwrap();
    let p = fillers.append_to(&initial_place(&d.netlist, &d.region));
    let field = solve(&model.build_density(&p).unwrap()).unwrap();
    let raw = model.rasterize(&p).unwrap();
    let direct: f64 = raw
        .rho
        .iter()
        .zip(&field.psi)
        .map(|(r, s)| r * s)
        .sum::<f64>()
        * geom.bin_area();
    let e = model.potential_energy(&field, &p).unwrap();
    assert!((e - direct).abs() <= 1e-9 * direct.abs().max(1.0));
    assert!(e > 0.0);
}

#[test]
fn fillers_cover_the_whitespace() {
    let d = common::synth(300, 33);
    let fillers = density::insert_fillers(&d.netlist, &d.region, 1.0, 2);
    let ws = density::whitespace_area(&d.netlist, &d.region);
    let budget = ws - d.netlist.movable_area();
    let one = fillers.nodes[0].area();
    assert!(fillers.total_area() <= budget + 1e-9);
    assert!(fillers.total_area() > budget - one);
}
