//! Quadratic initial placement with the bound-to-bound net model.
//!
//! Each round linearizes every net around the current coordinates: the two
//! extreme pins on an axis are connected to each other and to every inner
//! pin with weight `2 / ((p - 1) * distance)`, which makes the quadratic
//! form equal to HPWL at the linearization point. The resulting sparse SPD
//! systems (one per axis) are solved with Jacobi-preconditioned CG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Netlist, PlacementState, Region};

pub const B2B_ROUNDS: usize = 8;
pub const CG_TOLERANCE: f64 = 1e-5;
const CG_MAX_ITERS: usize = 2000;
const JITTER_SEED: u64 = 0x05ee_db2b;

/// Sparse symmetric system for one axis, in CSR form.
#[derive(Debug, Clone)]
pub struct QuadSystem {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Constant part of the quadratic (fixed-to-fixed offsets).
    pub constant: f64,
}

impl QuadSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    /// `x^T A x - 2 b^T x + constant`: the weighted sum of squared pin
    /// distances this system minimizes.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.mul(x, &mut ax);
        let quad: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let lin: f64 = x.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        quad - 2.0 * lin + self.constant
    }

    /// Jacobi-preconditioned conjugate gradient, warm-started from `x`.
    /// Returns the number of iterations.
    pub fn solve_pcg(&self, x: &mut [f64], tol: f64, max_iters: usize) -> usize {
        let n = self.dim();
        let inv_diag: Vec<f64> = self
            .diagonal()
            .into_iter()
            .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        let b_norm = self
            .rhs
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            .max(1e-300);
        let mut r = vec![0.0; n];
        self.mul(x, &mut r);
        for i in 0..n {
            r[i] = self.rhs[i] - r[i];
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0; n];
        for it in 0..max_iters {
            let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r_norm <= tol * b_norm {
                return it;
            }
            self.mul(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return it;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        max_iters
    }
}

struct Builder {
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
    constant: f64,
}

impl Builder {
    /// Adds `w * (pa - pb)^2` where `pa = x[a] + oa` if `a` is a variable,
    /// else the constant coordinate `oa` (same for `b`).
    fn edge(&mut self, a: Option<usize>, oa: f64, b: Option<usize>, ob: f64, w: f64) {
        match (a, b) {
            (Some(va), Some(vb)) => {
                if va == vb {
                    return;
                }
                self.triplets.push((va, va, w));
                self.triplets.push((vb, vb, w));
                self.triplets.push((va, vb, -w));
                self.triplets.push((vb, va, -w));
                self.rhs[va] += w * (ob - oa);
                self.rhs[vb] += w * (oa - ob);
                self.constant += w * (oa - ob) * (oa - ob);
            }
            (Some(v), None) | (None, Some(v)) => {
                let (off, anchor) = if a.is_some() { (oa, ob) } else { (ob, oa) };
                self.triplets.push((v, v, w));
                self.rhs[v] += w * (anchor - off);
                self.constant += w * (anchor - off) * (anchor - off);
            }
            (None, None) => {}
        }
    }

    fn finish(mut self) -> QuadSystem {
        let n = self.rhs.len();
        self.triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last = None;
        for (r, c, v) in self.triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("merged entry") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        QuadSystem {
            row_ptr,
            cols,
            vals,
            rhs: self.rhs,
            constant: self.constant,
        }
    }
}

/// Builds the bound-to-bound system for one axis around `coords` (movable
/// node coordinates on that axis). `var_of[node]` maps movable nodes that
/// take part to their variable index. With `uniform`, every pin distance
/// is taken as 1, which gives the plain star-like quadratic used to seed
/// the first round.
pub fn build_b2b_system(
    netlist: &Netlist,
    coords: &[f64],
    var_of: &[Option<usize>],
    num_vars: usize,
    axis: usize,
    eps: f64,
    uniform: bool,
) -> QuadSystem {
    let m = netlist.num_movable();
    let mut builder = Builder {
        triplets: Vec::new(),
        rhs: vec![0.0; num_vars],
        constant: 0.0,
    };
    let mut pins = Vec::new();
    for net in &netlist.nets {
        let p = net.degree();
        if p < 2 {
            continue;
        }
        pins.clear();
        for pin in netlist.net_pins(net) {
            let off = if axis == 0 {
                pin.offset.0
            } else {
                pin.offset.1
            };
            let (var, base) = if pin.node < m {
                (var_of[pin.node], coords[pin.node])
            } else {
                let c = netlist.nodes[pin.node].center;
                (None, if axis == 0 { c.0 } else { c.1 })
            };
            // Variables carry their offset; constants carry the absolute
            // pin coordinate.
            let term = if var.is_some() { off } else { base + off };
            pins.push((var, term, base + off));
        }
        let lo = (0..p)
            .min_by(|&i, &j| pins[i].2.total_cmp(&pins[j].2))
            .expect("net has pins");
        let hi = (0..p)
            .max_by(|&i, &j| pins[i].2.total_cmp(&pins[j].2).then(j.cmp(&i)))
            .expect("net has pins");
        let hi = if hi == lo { (lo + 1) % p } else { hi };
        let scale = 2.0 / (p - 1) as f64;
        let mut connect = |i: usize, j: usize| {
            let d = if uniform {
                1.0
            } else {
                (pins[i].2 - pins[j].2).abs().max(eps)
            };
            builder.edge(pins[i].0, pins[i].1, pins[j].0, pins[j].1, scale / d);
        };
        connect(lo, hi);
        for k in 0..p {
            if k != lo && k != hi {
                connect(k, lo);
                connect(k, hi);
            }
        }
    }
    builder.finish()
}

/// Per-round diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundStats {
    /// Quadratic objective (both axes) at the linearization point.
    pub quad_before: f64,
    /// Quadratic objective after the solve.
    pub quad_after: f64,
    pub max_move: f64,
    pub cg_iters: usize,
}

#[derive(Debug, Clone, Default)]
pub struct InitialReport {
    pub rounds: Vec<RoundStats>,
    /// Movable nodes on components without any fixed pin.
    pub floating: usize,
}

/// Union-find over movable nodes; returns, per movable node, whether its
/// connected component touches a fixed pin.
fn anchored_nodes(netlist: &Netlist) -> Vec<bool> {
    let m = netlist.num_movable();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut anchored_root = vec![false; m];
    let mut net_has_fixed = Vec::with_capacity(netlist.nets.len());
    for net in &netlist.nets {
        let pins = netlist.net_pins(net);
        let mut first = None;
        let mut fixed = false;
        for pin in pins {
            if pin.node >= m {
                fixed = true;
                continue;
            }
            match first {
                None => first = Some(pin.node),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, pin.node));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        net_has_fixed.push((first, fixed));
    }
    for (first, fixed) in net_has_fixed {
        if let (Some(f), true) = (first, fixed) {
            let r = find(&mut parent, f);
            anchored_root[r] = true;
        }
    }
    (0..m)
        .map(|i| {
            let r = find(&mut parent, i);
            anchored_root[r]
        })
        .collect()
}

/// Worker threads for internal parallelism, from `FFTPL_THREADS`
/// (default 1).
pub fn thread_count() -> usize {
    std::env::var("FFTPL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

pub fn initial_place(netlist: &Netlist, region: &Region) -> PlacementState {
    initial_place_with_report(netlist, region).0
}

pub fn initial_place_with_report(
    netlist: &Netlist,
    region: &Region,
) -> (PlacementState, InitialReport) {
    let m = netlist.num_movable();
    let bbox = region.bbox;
    let center = bbox.center();
    let span = bbox.width().max(bbox.height());
    let eps = 1e-4 * span;
    let site = region.site_width();

    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    let mut placement = PlacementState {
        x: Vec::with_capacity(m),
        y: Vec::with_capacity(m),
    };
    for _ in 0..m {
        placement
            .x
            .push(center.0 + site * rng.random_range(-0.5..=0.5));
        placement
            .y
            .push(center.1 + site * rng.random_range(-0.5..=0.5));
    }

    let anchored = anchored_nodes(netlist);
    let mut var_of = vec![None; m];
    let mut vars = Vec::new();
    for i in 0..m {
        if anchored[i] {
            var_of[i] = Some(vars.len());
            vars.push(i);
        }
    }
    let mut report = InitialReport {
        rounds: Vec::new(),
        floating: m - vars.len(),
    };
    if vars.is_empty() {
        return (placement, report);
    }

    let threads = thread_count();
    // Round 0 solves the unit-distance quadratic so that the bound-to-bound
    // rounds start from a spread-out point rather than the jittered center,
    // where nearly coincident pins would get huge weights and lock together.
    for round in 0..=B2B_ROUNDS {
        let solve_axis = |axis: usize| {
            let coords = if axis == 0 {
                &placement.x
            } else {
                &placement.y
            };
            let sys = build_b2b_system(netlist, coords, &var_of, vars.len(), axis, eps, round == 0);
            let mut x: Vec<f64> = vars.iter().map(|&i| coords[i]).collect();
            let before = sys.objective(&x);
            let iters = sys.solve_pcg(&mut x, CG_TOLERANCE, CG_MAX_ITERS);
            let after = sys.objective(&x);
            (x, before, after, iters)
        };
        let (rx, ry) = if threads > 1 {
            std::thread::scope(|s| {
                let hx = s.spawn(|| solve_axis(0));
                let ry = solve_axis(1);
                (hx.join().expect("x-axis solve panicked"), ry)
            })
        } else {
            (solve_axis(0), solve_axis(1))
        };
        let mut max_move: f64 = 0.0;
        for (k, &i) in vars.iter().enumerate() {
            max_move = max_move
                .max((rx.0[k] - placement.x[i]).abs())
                .max((ry.0[k] - placement.y[i]).abs());
            placement.x[i] = rx.0[k];
            placement.y[i] = ry.0[k];
        }
        report.rounds.push(RoundStats {
            quad_before: rx.1 + ry.1,
            quad_after: rx.2 + ry.2,
            max_move,
            cg_iters: rx.3.max(ry.3),
        });
        if round > 0 && max_move < 1e-3 * span {
            break;
        }
    }
    for i in 0..m {
        let node = &netlist.nodes[i];
        let c = region.clamp_center((placement.x[i], placement.y[i]), node.width, node.height);
        placement.x[i] = c.0;
        placement.y[i] = c.1;
    }
    (placement, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Node, NodeKind, Row};

    fn node(name: &str, kind: NodeKind, center: (f64, f64)) -> Node {
        Node {
            id: 0,
            name: name.into(),
            kind,
            width: 0.01,
            height: 0.01,
            center,
            charge: 1e-4,
            non_image: false,
        }
    }

    fn region(w: f64, h: f64) -> Region {
        Region::from_rows(vec![Row {
            y: 0.0,
            height: h,
            x_lo: 0.0,
            x_hi: w,
            site_width: 0.01,
        }])
        .unwrap()
    }

    #[test]
    fn chain_between_two_pads() {
        // pad(0) - a - b - pad(10): minimizer of a^2 + (b-a)^2 + (10-b)^2.
        let nodes = vec![
            node("p0", NodeKind::Fixed, (0.0, 5.0)),
            node("a", NodeKind::Movable, (0.0, 0.0)),
            node("b", NodeKind::Movable, (0.0, 0.0)),
            node("p1", NodeKind::Fixed, (10.0, 5.0)),
        ];
        let o = (0.0, 0.0);
        let nets = vec![
            ("n0".into(), vec![(0, o), (1, o)]),
            ("n1".into(), vec![(1, o), (2, o)]),
            ("n2".into(), vec![(2, o), (3, o)]),
        ];
        let nl = Netlist::new(nodes, nets).unwrap();
        let (p, report) = initial_place_with_report(&nl, &region(10.0, 10.0));
        assert!((p.x[0] - 10.0 / 3.0).abs() < 1e-3, "a = {}", p.x[0]);
        assert!((p.x[1] - 20.0 / 3.0).abs() < 1e-3, "b = {}", p.x[1]);
        assert!((p.y[0] - 5.0).abs() < 1e-3);
        for r in &report.rounds {
            assert!(r.quad_after <= r.quad_before + 1e-9 * r.quad_before.abs().max(1.0));
        }
    }

    #[test]
    fn single_cell_sits_on_its_pad() {
        let nodes = vec![
            node("a", NodeKind::Movable, (0.0, 0.0)),
            node("p", NodeKind::Fixed, (7.0, 3.0)),
        ];
        let nl = Netlist::new(
            nodes,
            vec![("n".into(), vec![(0, (0.0, 0.0)), (1, (0.0, 0.0))])],
        )
        .unwrap();
        let p = initial_place(&nl, &region(10.0, 10.0));
        assert!((p.x[0] - 7.0).abs() < 1e-6);
        assert!((p.y[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn unanchored_cells_stay_near_center() {
        let nodes = vec![
            node("a", NodeKind::Movable, (0.0, 0.0)),
            node("b", NodeKind::Movable, (0.0, 0.0)),
            node("c", NodeKind::Movable, (0.0, 0.0)),
        ];
        let o = (0.0, 0.0);
        let nl = Netlist::new(nodes, vec![("n".into(), vec![(0, o), (1, o), (2, o)])]).unwrap();
        let reg = region(10.0, 10.0);
        let (p, report) = initial_place_with_report(&nl, &reg);
        assert_eq!(report.floating, 3);
        for i in 0..3 {
            assert!((p.x[i] - 5.0).abs() <= 0.5 * reg.site_width() + 1e-12);
            assert!((p.y[i] - 5.0).abs() <= 0.5 * reg.site_width() + 1e-12);
        }
    }

    #[test]
    fn pcg_solves_small_spd_system() {
        // [[4, -1], [-1, 3]] x = [1, 2]
        let sys = QuadSystem {
            row_ptr: vec![0, 2, 4],
            cols: vec![0, 1, 0, 1],
            vals: vec![4.0, -1.0, -1.0, 3.0],
            rhs: vec![1.0, 2.0],
            constant: 0.0,
        };
        let mut x = vec![0.0, 0.0];
        sys.solve_pcg(&mut x, 1e-12, 100);
        assert!((x[0] - 5.0 / 11.0).abs() < 1e-10);
        assert!((x[1] - 9.0 / 11.0).abs() < 1e-10);
    }
}
