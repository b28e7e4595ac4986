//! Shared oracles and fixtures for the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_placer::density::{self, DensityGrid};
use spectral_placer::engine::schedule::DELTA_W_REF;
use spectral_placer::engine::{from_flat, initial_lambda, to_flat, Objective};
use spectral_placer::grid::GridGeometry;
use spectral_placer::initial::initial_place;
use spectral_placer::model::bookshelf::Design;
use spectral_placer::model::synth::{synthesize_instance, SynthConfig};
use spectral_placer::model::{PlacementState, Rect};
use spectral_placer::wirelength::{wa_total, wa_wirelength};

pub fn unit_grid(n: usize, rho: Vec<f64>) -> DensityGrid {
    DensityGrid {
        geom: GridGeometry::covering(&Rect::new(0.0, 0.0, n as f64, n as f64), n),
        rho,
        dc_removed: true,
    }
}

pub fn random_zero_mean(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    v
}

/// Cosine coefficients exactly as the defining double sum writes them,
/// `1/(2n) sum rho cos(w_u x) cos(w_v y)` at bin centers.
pub fn naive_coeffs(n: usize, rho: &[f64]) -> Vec<f64> {
    let w = |k: usize| PI * k as f64 / n as f64;
    let mut a = vec![0.0; n * n];
    for v in 0..n {
        for u in 0..n {
            let mut s = 0.0;
            for iy in 0..n {
                for ix in 0..n {
                    let (x, y) = (ix as f64 + 0.5, iy as f64 + 0.5);
                    s += rho[iy * n + ix] * (w(u) * x).cos() * (w(v) * y).cos();
                }
            }
            a[v * n + u] = s / (2 * n) as f64;
        }
    }
    a
}

/// Potential and field by projecting onto the orthonormal half-sample
/// cosine basis and dividing each mode by its Laplacian eigenvalue.
/// Independent of the solver's coefficient bookkeeping.
pub fn naive_field(n: usize, rho: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let w = |k: usize| PI * k as f64 / n as f64;
    let norm = |k: usize| {
        if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        }
    };
    let basis = |k: usize, t: f64| norm(k) * (w(k) * t).cos();
    let dbasis = |k: usize, t: f64| norm(k) * (w(k) * t).sin();
    let mut proj = vec![0.0; n * n];
    for v in 0..n {
        for u in 0..n {
            let mut s = 0.0;
            for iy in 0..n {
                for ix in 0..n {
                    s += rho[iy * n + ix] * basis(u, ix as f64 + 0.5) * basis(v, iy as f64 + 0.5);
                }
            }
            proj[v * n + u] = s;
        }
    }
    let mut psi = vec![0.0; n * n];
    let mut ex = vec![0.0; n * n];
    let mut ey = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            let (x, y) = (ix as f64 + 0.5, iy as f64 + 0.5);
            let b = iy * n + ix;
            for v in 0..n {
                for u in 0..n {
                    if u == 0 && v == 0 {
                        continue;
                    }
                    let c = proj[v * n + u] / (w(u) * w(u) + w(v) * w(v));
                    psi[b] += c * basis(u, x) * basis(v, y);
                    // E = -grad psi; d/dt cos(w t) = -w sin(w t).
                    ex[b] += c * w(u) * dbasis(u, x) * basis(v, y);
                    ey[b] += c * w(v) * basis(u, x) * dbasis(v, y);
                }
            }
        }
    }
    (psi, ex, ey)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

pub fn synth(m: usize, seed: u64) -> Design {
    synthesize_instance(m, seed, &SynthConfig::default()).expect("synthetic instance")
}

/// Movable cells and fillers at random interior positions.
pub fn interior_placement(d: &Design, obj: &Objective, margin: f64, seed: u64) -> PlacementState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bb = d.region.bbox;
    let n = obj.num_cells();
    let mut p = PlacementState {
        x: vec![0.0; n],
        y: vec![0.0; n],
    };
    for i in 0..n {
        let (w, h) = obj.density.cell_size(i);
        p.x[i] = rng.random_range(bb.x_lo + w / 2.0 + margin..bb.x_hi - w / 2.0 - margin);
        p.y[i] = rng.random_range(bb.y_lo + h / 2.0 + margin..bb.y_hi - h / 2.0 - margin);
    }
    p
}

/// `||g - g_fd||_2 / ||g_fd||_2` with central differences of `f` at step `h`.
pub fn fd_relative_error(f: impl Fn(&[f64]) -> f64, x: &[f64], g: &[f64], h: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        let fd = (fp - fm) / (2.0 * h);
        num += (g[i] - fd).powi(2);
        den += fd * fd;
    }
    (num / den).sqrt()
}

pub fn full_gradient_error() -> f64 {
    // Cells span several bins, so the sampled field is close to the
    // derivative of the rasterized energy.
    let d = synth(50, 3);
    let fillers = density::insert_fillers(&d.netlist, &d.region, 1.0, 1);
    let geom = GridGeometry::covering(&d.region.bbox, 64);
    let obj = Objective::new(&d.netlist, &d.region, &fillers, geom, 1.0).unwrap();
    let p = interior_placement(&d, &obj, geom.w_b, 9);
    let gamma = 0.05 * d.region.bbox.width();
    let lambda = initial_lambda(&obj.evaluate(&p, 1.0, gamma).unwrap());
    let e = obj.evaluate(&p, lambda, gamma).unwrap();
    fd_relative_error(
        |x| obj.value(&from_flat(x), lambda, gamma).unwrap(),
        &to_flat(&p),
        &e.grad,
        0.5 * geom.w_b,
    )
}

/// Largest relative error of the smoothed-wirelength gradient against
/// central differences, with `gamma` at 1% of the spread.
pub fn wa_gradient_error() -> f64 {
    let d = synth(120, 8);
    let bb = d.region.bbox;
    let gamma = 0.01 * bb.width().max(bb.height());
    let p = initial_place(&d.netlist, &d.region);
    let r = wa_wirelength(&d.netlist, &p, gamma).unwrap();
    let (gx, gy) = r.gradient.unwrap();
    let h = 1e-5 * gamma;
    let mut num = 0.0;
    let mut den = 0.0;
    for axis in 0..2 {
        for i in 0..p.len() {
            let mut a = p.clone();
            let mut b = p.clone();
            let (ca, cb) = if axis == 0 {
                (&mut a.x[i], &mut b.x[i])
            } else {
                (&mut a.y[i], &mut b.y[i])
            };
            *ca += h;
            *cb -= h;
            let fd = (wa_total(&d.netlist, &a, gamma).unwrap()
                - wa_total(&d.netlist, &b, gamma).unwrap())
                / (2.0 * h);
            let g = if axis == 0 { gx[i] } else { gy[i] };
            num += (g - fd).powi(2);
            den += fd * fd;
        }
    }
    (num / den).sqrt()
}

/// Independent restatement of the schedules.
pub fn mu_ref(dw: f64) -> f64 {
    (std::f64::consts::LN_10 * (1.0 - dw / DELTA_W_REF) * 1.1f64.log10())
        .exp()
        .clamp(0.75, 1.1)
}

pub fn gamma_ref(tau: f64, w_b: f64) -> f64 {
    0.8 * w_b * (std::f64::consts::LN_10 * 20.0 / 9.0 * (tau - 0.1)).exp()
}

pub const SCHEDULE_TABLE: [(f64, f64); 20] = [
    (0.0, 1.0),
    (3.5e5, 0.1),
    (-3.5e5, 0.95),
    (7.0e5, 0.9),
    (1.0e5, 0.8),
    (-1.0e5, 0.7),
    (2.0e5, 0.6),
    (5.0e5, 0.5),
    (1.0e6, 0.45),
    (-1.0e6, 0.4),
    (1.75e5, 0.35),
    (2.5e4, 0.3),
    (-2.5e4, 0.25),
    (1.0, 0.2),
    (3.0e6, 0.15),
    (6.0e5, 0.12),
    (4.2e5, 0.11),
    (-5.0e4, 0.1),
    (8.75e4, 0.55),
    (1.2e6, 0.65),
];
