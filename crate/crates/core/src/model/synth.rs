//! Deterministic synthetic benchmark generator.
//!
//! Cells get a log-normal width spread and one row of height. Every cell
//! seeds one net whose other members are drawn from its neighborhood in a
//! hidden unit-square embedding, which gives the local, Rent-like
//! connectivity real netlists have. Pads sit just outside the region
//! boundary and attach to the cells nearest to them in the embedding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{PlaceError, Result};
use crate::model::bookshelf::Design;
use crate::model::{NetSpec, Netlist, Node, NodeKind, PlacementState, Region, Row};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Fraction of row area left empty.
    pub whitespace: f64,
    pub row_height: f64,
    /// Median cell width in sites.
    pub median_width: f64,
    pub max_width: f64,
    /// Number of perimeter pads; `None` picks `max(4, sqrt(m))`.
    pub pads: Option<usize>,
    /// Shorten the top quarter of the rows so the region is not a rectangle.
    pub notch: bool,
    /// Force the row count and sites per row instead of deriving them from
    /// the whitespace target.
    pub rows: Option<usize>,
    pub sites_per_row: Option<usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            whitespace: 0.5,
            row_height: 12.0,
            median_width: 6.0,
            max_width: 40.0,
            pads: None,
            notch: false,
            rows: None,
            sites_per_row: None,
        }
    }
}

// Net degree distribution, roughly what ISPD netlists show.
const DEGREES: [(usize, f64); 7] = [
    (2, 0.55),
    (3, 0.20),
    (4, 0.10),
    (5, 0.06),
    (6, 0.04),
    (7, 0.03),
    (8, 0.02),
];

fn sample_degree(rng: &mut ChaCha8Rng) -> usize {
    let mut u: f64 = rng.random();
    for &(d, p) in &DEGREES {
        if u < p {
            return d;
        }
        u -= p;
    }
    DEGREES[DEGREES.len() - 1].0
}

/// Spatial hash over the hidden embedding.
struct Buckets {
    side: usize,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(points: &[(f64, f64)]) -> Self {
        let side = ((points.len() as f64 / 4.0).sqrt().ceil() as usize).max(1);
        let mut cells = vec![Vec::new(); side * side];
        for (i, p) in points.iter().enumerate() {
            let (bx, by) = Self::bucket(side, *p);
            cells[by * side + bx].push(i);
        }
        Buckets { side, cells }
    }

    fn bucket(side: usize, p: (f64, f64)) -> (usize, usize) {
        let f = |v: f64| ((v * side as f64) as usize).min(side - 1);
        (f(p.0), f(p.1))
    }

    /// All points in buckets within Chebyshev distance `r` of `p`'s bucket.
    fn around(&self, p: (f64, f64), r: usize) -> Vec<usize> {
        let (bx, by) = Self::bucket(self.side, p);
        let mut out = Vec::new();
        let lo = |b: usize| b.saturating_sub(r);
        let hi = |b: usize| (b + r).min(self.side - 1);
        for y in lo(by)..=hi(by) {
            for x in lo(bx)..=hi(bx) {
                out.extend_from_slice(&self.cells[y * self.side + x]);
            }
        }
        out
    }
}

/// Builds a pseudo-random instance with `m` movable cells.
pub fn synthesize_instance(m: usize, seed: u64, cfg: &SynthConfig) -> Result<Design> {
    if m < 2 {
        return Err(PlaceError::InvalidArgument(format!(
            "need at least 2 movable cells, got {m}"
        )));
    }
    if !(0.0..1.0).contains(&cfg.whitespace) {
        return Err(PlaceError::InvalidArgument(format!(
            "whitespace fraction {} outside [0, 1)",
            cfg.whitespace
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = cfg.row_height;

    let width_dist = LogNormal::new(cfg.median_width.ln(), 0.5)
        .map_err(|e| PlaceError::InvalidArgument(e.to_string()))?;
    let widths: Vec<f64> = (0..m)
        .map(|_| {
            width_dist
                .sample(&mut rng)
                .round()
                .clamp(1.0, cfg.max_width)
        })
        .collect();
    let cell_area: f64 = widths.iter().sum::<f64>() * h;

    // Row layout: a roughly square stack of rows. With a notch the top
    // quarter of the rows is 25% shorter.
    let target = cell_area / (1.0 - cfg.whitespace);
    let num_rows = cfg
        .rows
        .unwrap_or_else(|| ((target.sqrt() / h).round() as usize).max(1));
    let short = if cfg.notch { num_rows / 4 } else { 0 };
    let eff_rows = num_rows as f64 - 0.25 * short as f64;
    let sites =
        cfg.sites_per_row
            .unwrap_or_else(|| (target / (h * eff_rows)).round().max(1.0) as usize) as f64;
    let short_sites = (0.75 * sites).round();
    let rows: Vec<Row> = (0..num_rows)
        .map(|r| Row {
            y: r as f64 * h,
            height: h,
            x_lo: 0.0,
            x_hi: if r >= num_rows - short {
                short_sites
            } else {
                sites
            },
            site_width: 1.0,
        })
        .collect();
    let region = Region::from_rows(rows)?;
    if cell_area > region.row_area() {
        return Err(PlaceError::Infeasible(format!(
            "cell area {cell_area} exceeds row area {}",
            region.row_area()
        )));
    }
    if widths.iter().any(|&w| w > sites) {
        return Err(PlaceError::Infeasible(
            "a cell is wider than the rows".into(),
        ));
    }

    let center = region.bbox.center();
    let mut nodes: Vec<Node> = widths
        .iter()
        .enumerate()
        .map(|(i, &w)| Node {
            id: i,
            name: format!("c{i}"),
            kind: NodeKind::Movable,
            width: w,
            height: h,
            center,
            charge: w * h,
            non_image: false,
        })
        .collect();

    let hidden: Vec<(f64, f64)> = (0..m).map(|_| (rng.random(), rng.random())).collect();
    let buckets = Buckets::new(&hidden);

    let offset = |rng: &mut ChaCha8Rng, node: &Node| {
        // Quarter-unit grid keeps the text files exact.
        let q = |v: f64| (v * 4.0).round() / 4.0;
        (
            q(rng.random_range(-0.4..=0.4) * node.width),
            q(rng.random_range(-0.4..=0.4) * node.height),
        )
    };

    let mut nets: Vec<NetSpec> = Vec::new();
    for seed_cell in 0..m {
        let degree = sample_degree(&mut rng).min(m);
        let mut members = vec![seed_cell];
        let mut radius = 1;
        let mut pool = buckets.around(hidden[seed_cell], radius);
        while pool.len() < degree + 1 && pool.len() < m {
            radius += 1;
            pool = buckets.around(hidden[seed_cell], radius);
        }
        pool.retain(|&c| c != seed_cell);
        while members.len() < degree && !pool.is_empty() {
            let k = rng.random_range(0..pool.len());
            members.push(pool.swap_remove(k));
        }
        let pins = members
            .into_iter()
            .map(|c| (c, offset(&mut rng, &nodes[c])))
            .collect();
        nets.push((format!("n{}", nets.len()), pins));
    }

    // Perimeter pads, each tied to the one or two nearest cells.
    let num_pads = cfg
        .pads
        .unwrap_or_else(|| ((m as f64).sqrt().round() as usize).max(4));
    let bb = region.bbox;
    let pad = 2.0;
    for k in 0..num_pads {
        let t = (k as f64 + 0.5) / num_pads as f64 * 4.0;
        let side = t.floor() as usize;
        let s = t.fract();
        let (hx, hy) = match side {
            0 => (s, 0.0),
            1 => (1.0, s),
            2 => (1.0 - s, 1.0),
            _ => (0.0, 1.0 - s),
        };
        let (px, py) = match side {
            0 => (bb.x_lo + s * bb.width(), bb.y_lo - 0.5 * pad),
            1 => (bb.x_hi + 0.5 * pad, bb.y_lo + s * bb.height()),
            2 => (bb.x_hi - s * bb.width(), bb.y_hi + 0.5 * pad),
            _ => (bb.x_lo - 0.5 * pad, bb.y_hi - s * bb.height()),
        };
        let id = nodes.len();
        nodes.push(Node {
            id,
            name: format!("p{k}"),
            kind: NodeKind::Fixed,
            width: pad,
            height: pad,
            center: (px, py),
            charge: pad * pad,
            non_image: false,
        });
        let mut near = buckets.around((hx, hy), 1);
        if near.is_empty() {
            near = (0..m).collect();
        }
        let d2 = |c: usize| (hidden[c].0 - hx).powi(2) + (hidden[c].1 - hy).powi(2);
        near.sort_by(|&a, &b| d2(a).total_cmp(&d2(b)).then(a.cmp(&b)));
        let take = rng.random_range(1..=2usize).min(near.len());
        let mut pins = vec![(id, (0.0, 0.0))];
        for &c in &near[..take] {
            pins.push((c, offset(&mut rng, &nodes[c])));
        }
        nets.push((format!("n{}", nets.len()), pins));
    }

    let netlist = Netlist::new(nodes, nets)?;
    let placement = PlacementState {
        x: vec![center.0; m],
        y: vec![center.1; m],
    };
    Ok(Design {
        netlist,
        region,
        placement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_same_seed() {
        let a = synthesize_instance(200, 7, &SynthConfig::default()).unwrap();
        let b = synthesize_instance(200, 7, &SynthConfig::default()).unwrap();
        assert_eq!(a.netlist.nodes, b.netlist.nodes);
        assert_eq!(a.netlist.pins, b.netlist.pins);
        assert_eq!(a.region, b.region);
        let c = synthesize_instance(200, 8, &SynthConfig::default()).unwrap();
        assert_ne!(a.netlist.pins, c.netlist.pins);
    }

    #[test]
    fn whitespace_matches_target() {
        let d = synthesize_instance(100, 3, &SynthConfig::default()).unwrap();
        let util = d.netlist.movable_area() / d.region.row_area();
        assert!((0.45..=0.55).contains(&util), "utilization {util}");
    }

    #[test]
    fn two_cells_share_a_net() {
        let d = synthesize_instance(2, 1, &SynthConfig::default()).unwrap();
        let nl = &d.netlist;
        let found = nl.nets.iter().any(|net| {
            let pins = nl.net_pins(net);
            pins.iter().any(|p| p.node == 0) && pins.iter().any(|p| p.node == 1)
        });
        assert!(found);
    }

    #[test]
    fn instance_is_valid() {
        for notch in [false, true] {
            let cfg = SynthConfig {
                notch,
                ..SynthConfig::default()
            };
            let d = synthesize_instance(300, 11, &cfg).unwrap();
            d.netlist.validate().unwrap();
            assert_eq!(d.netlist.num_movable(), 300);
            assert_eq!(d.placement.len(), 300);
            assert_eq!(!d.region.dark_rects.is_empty(), notch);
            let netted: std::collections::HashSet<usize> =
                d.netlist.pins.iter().map(|p| p.node).collect();
            assert!((0..300).all(|c| netted.contains(&c)));
            for net in &d.netlist.nets {
                assert!((2..=8).contains(&net.degree()) || net.degree() <= 3);
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(synthesize_instance(1, 0, &SynthConfig::default()).is_err());
        let cfg = SynthConfig {
            rows: Some(2),
            sites_per_row: Some(10),
            ..SynthConfig::default()
        };
        assert!(matches!(
            synthesize_instance(100, 0, &cfg),
            Err(PlaceError::Infeasible(_))
        ));
    }
}
