//! Row legalization and a small greedy detailed-placement pass.
//!
//! Cells are visited left to right. Each one goes to the row segment where
//! its squared displacement is smallest, with cells inside a segment packed
//! by cluster collapsing: overlapping neighbors merge into clusters that sit
//! at the mean of their members' targets. Multi-row cells are not moved
//! between rows; they are snapped in place and treated as obstacles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PlaceError, Result};
use crate::model::{Netlist, PlacementState, Rect, Region};
use crate::wirelength::net_hpwl;

const EPS: f64 = 1e-9;

/// Legal placement of the movable cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RowAssignment {
    /// Per region row: `(node, x_lo)` sorted by `x_lo`. Multi-row cells are
    /// not listed.
    pub rows: Vec<Vec<(usize, f64)>>,
    /// Legal centers of all movable cells.
    pub placement: PlacementState,
    /// Distance each cell moved from its global-placement center.
    pub displacement: Vec<f64>,
}

impl RowAssignment {
    pub fn total_displacement(&self) -> f64 {
        self.displacement.iter().sum()
    }
}

/// Free stretch of a row between obstacles.
#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
}

fn snap_up(v: f64, origin: f64, site: f64) -> f64 {
    origin + ((v - origin) / site - EPS).ceil() * site
}

fn snap_down(v: f64, origin: f64, site: f64) -> f64 {
    origin + ((v - origin) / site + EPS).floor() * site
}

fn snap_nearest(v: f64, origin: f64, site: f64) -> f64 {
    origin + ((v - origin) / site).round() * site
}

/// Rows `[r0, r1)` whose vertical extent overlaps `[y_lo, y_hi)`.
fn rows_spanned(region: &Region, y_lo: f64, y_hi: f64) -> std::ops::Range<usize> {
    let rows = &region.rows;
    let r0 = rows.partition_point(|r| r.y + r.height <= y_lo + EPS);
    let r1 = rows.partition_point(|r| r.y < y_hi - EPS);
    r0..r1.max(r0)
}

fn is_multi_row(netlist: &Netlist, region: &Region, i: usize) -> bool {
    netlist.nodes[i].height > region.row_height() + EPS
}

/// Segments of every row after removing `blockers`, site-aligned.
fn free_segments(region: &Region, blockers: &[Rect]) -> Vec<Vec<Segment>> {
    let mut per_row: Vec<Vec<(f64, f64)>> = vec![Vec::new(); region.rows.len()];
    for b in blockers {
        for r in rows_spanned(region, b.y_lo, b.y_hi) {
            per_row[r].push((b.x_lo, b.x_hi));
        }
    }
    region
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut cuts = std::mem::take(&mut per_row[r]);
            cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut out = Vec::new();
            let mut cursor = row.x_lo;
            let push = |lo: f64, hi: f64, out: &mut Vec<Segment>| {
                let lo = snap_up(lo, row.x_lo, row.site_width);
                let hi = snap_down(hi, row.x_lo, row.site_width);
                if hi - lo > EPS {
                    out.push(Segment { lo, hi });
                }
            };
            for (a, b) in cuts {
                if a > cursor {
                    push(cursor, a.min(row.x_hi), &mut out);
                }
                cursor = cursor.max(b);
            }
            if cursor < row.x_hi {
                push(cursor, row.x_hi, &mut out);
            }
            out
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Cluster {
    first: usize,
    e: f64,
    q: f64,
    w: f64,
    x: f64,
}

/// Cells of one segment packed by cluster collapsing.
#[derive(Debug, Clone, Default)]
struct Packer {
    cells: Vec<(usize, f64, f64)>, // (node, target x_lo, width)
    clusters: Vec<Cluster>,
    used: f64,
}

impl Packer {
    fn place(lo: f64, hi: f64, c: &Cluster) -> f64 {
        (c.q / c.e).clamp(lo, (hi - c.w).max(lo))
    }

    /// x_lo the new cell would get; the packer is unchanged.
    fn trial(&self, seg: &Segment, target: f64, w: f64) -> f64 {
        let mut cur = Cluster {
            first: 0,
            e: 1.0,
            q: target,
            w,
            x: 0.0,
        };
        cur.x = Self::place(seg.lo, seg.hi, &cur);
        for prev in self.clusters.iter().rev() {
            if prev.x + prev.w <= cur.x + EPS {
                break;
            }
            cur = Cluster {
                first: prev.first,
                e: prev.e + cur.e,
                q: prev.q + cur.q - cur.e * prev.w,
                w: prev.w + cur.w,
                x: 0.0,
            };
            cur.x = Self::place(seg.lo, seg.hi, &cur);
        }
        cur.x + cur.w - w
    }

    fn push(&mut self, seg: &Segment, node: usize, target: f64, w: f64) {
        self.cells.push((node, target, w));
        self.used += w;
        let mut cur = Cluster {
            first: self.cells.len() - 1,
            e: 1.0,
            q: target,
            w,
            x: 0.0,
        };
        cur.x = Self::place(seg.lo, seg.hi, &cur);
        while let Some(prev) = self.clusters.last().copied() {
            if prev.x + prev.w <= cur.x + EPS {
                break;
            }
            self.clusters.pop();
            cur = Cluster {
                first: prev.first,
                e: prev.e + cur.e,
                q: prev.q + cur.q - cur.e * prev.w,
                w: prev.w + cur.w,
                x: 0.0,
            };
            cur.x = Self::place(seg.lo, seg.hi, &cur);
        }
        self.clusters.push(cur);
    }

    /// Final `(node, x_lo)` on the site grid.
    fn positions(&self, seg: &Segment, origin: f64, site: f64) -> Vec<(usize, f64)> {
        let mut xs = vec![0.0; self.cells.len()];
        for (ci, c) in self.clusters.iter().enumerate() {
            let end = self
                .clusters
                .get(ci + 1)
                .map_or(self.cells.len(), |n| n.first);
            let mut x = c.x;
            for k in c.first..end {
                xs[k] = x;
                x += self.cells[k].2;
            }
        }
        // Forward pass snaps to sites without overlap, backward pass pulls
        // anything past the segment end back in.
        let mut prev_end = seg.lo;
        for k in 0..xs.len() {
            let s = snap_nearest(xs[k], origin, site).max(snap_up(prev_end, origin, site));
            xs[k] = s;
            prev_end = s + self.cells[k].2;
        }
        let mut next_start = seg.hi;
        for k in (0..xs.len()).rev() {
            let w = self.cells[k].2;
            if xs[k] + w > next_start + EPS {
                xs[k] = snap_down(next_start - w, origin, site);
            }
            next_start = xs[k];
        }
        self.cells
            .iter()
            .zip(xs)
            .map(|(&(node, _, _), x)| (node, x))
            .collect()
    }
}

/// Snaps the movable cells of `placement` into rows without overlap.
pub fn legalize(
    placement: &PlacementState,
    netlist: &Netlist,
    region: &Region,
) -> Result<RowAssignment> {
    let m = netlist.num_movable();
    if placement.len() < m {
        return Err(PlaceError::InvalidArgument(format!(
            "placement has {} cells, netlist has {m} movable",
            placement.len()
        )));
    }
    if !placement.is_finite() {
        return Err(PlaceError::NonFinite("placement".into()));
    }
    if region.rows.is_empty() {
        return Err(PlaceError::Infeasible("region has no rows".into()));
    }
    let site = region.site_width();
    let row_h = region.row_height();
    let mut out = PlacementState {
        x: placement.x[..m].to_vec(),
        y: placement.y[..m].to_vec(),
    };

    // Obstacles: fixed nodes, then multi-row movable cells snapped in place.
    let mut blockers: Vec<Rect> = netlist
        .fixed()
        .iter()
        .filter(|n| !n.non_image)
        .map(|n| n.rect())
        .collect();
    let bbox = region.bbox;
    for i in 0..m {
        if !is_multi_row(netlist, region, i) {
            continue;
        }
        let node = &netlist.nodes[i];
        let (cx, cy) = region.clamp_center((out.x[i], out.y[i]), node.width, node.height);
        let y_lo = bbox.y_lo
            + (((cy - 0.5 * node.height - bbox.y_lo) / row_h).round() * row_h)
                .clamp(0.0, (bbox.height() - node.height).max(0.0));
        let x_lo = snap_nearest(cx - 0.5 * node.width, bbox.x_lo, site)
            .clamp(bbox.x_lo, (bbox.x_hi - node.width).max(bbox.x_lo));
        out.x[i] = x_lo + 0.5 * node.width;
        out.y[i] = y_lo + 0.5 * node.height;
        blockers.push(Rect::new(x_lo, y_lo, x_lo + node.width, y_lo + node.height));
    }
    let segments = free_segments(region, &blockers);

    let mut order: Vec<usize> = (0..m)
        .filter(|&i| !is_multi_row(netlist, region, i))
        .collect();
    let eff_width = |i: usize| (netlist.nodes[i].width / site - EPS).ceil().max(1.0) * site;
    let demand: f64 = order.iter().map(|&i| eff_width(i)).sum();
    let capacity: f64 = segments.iter().flatten().map(|s| s.hi - s.lo).sum();
    if demand > capacity + EPS {
        return Err(PlaceError::Infeasible(format!(
            "cells need {demand} of row length, rows offer {capacity}"
        )));
    }
    order.sort_by(|&a, &b| {
        let la = out.x[a] - 0.5 * netlist.nodes[a].width;
        let lb = out.x[b] - 0.5 * netlist.nodes[b].width;
        la.total_cmp(&lb).then(a.cmp(&b))
    });

    let mut packers: Vec<Vec<Packer>> = segments
        .iter()
        .map(|segs| vec![Packer::default(); segs.len()])
        .collect();
    let rows = &region.rows;
    for &i in &order {
        let w = eff_width(i);
        let tx = out.x[i] - 0.5 * netlist.nodes[i].width;
        let ty = out.y[i] - 0.5 * netlist.nodes[i].height;
        let nearest = rows.partition_point(|r| r.y < ty).min(rows.len() - 1);
        let mut best: Option<(f64, usize, usize)> = None;
        let (mut up, mut down) = (nearest, nearest as isize - 1);
        loop {
            // Visit rows in order of vertical distance.
            let dy_up = (up < rows.len()).then(|| (rows[up].y - ty).abs());
            let dy_down = (down >= 0).then(|| (rows[down as usize].y - ty).abs());
            let (r, dy) = match (dy_up, dy_down) {
                (Some(a), Some(b)) if a <= b => (up, a),
                (Some(a), None) => (up, a),
                (_, Some(b)) => (down as usize, b),
                (None, None) => break,
            };
            if r == up {
                up += 1;
            } else {
                down -= 1;
            }
            if best.is_some_and(|(c, _, _)| dy * dy >= c) {
                break;
            }
            for (s, seg) in segments[r].iter().enumerate() {
                let pk = &packers[r][s];
                if pk.used + w > seg.hi - seg.lo + EPS {
                    continue;
                }
                let x = pk.trial(seg, tx, w);
                let cost = (x - tx).powi(2) + dy * dy;
                if best.is_none_or(|(c, _, _)| cost < c) {
                    best = Some((cost, r, s));
                }
            }
        }
        let Some((_, r, s)) = best else {
            return Err(PlaceError::Infeasible(format!(
                "no row segment has room for cell {}",
                netlist.nodes[i].name
            )));
        };
        packers[r][s].push(&segments[r][s], i, tx, w);
    }

    let mut row_lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows.len()];
    for (r, segs) in segments.iter().enumerate() {
        for (s, seg) in segs.iter().enumerate() {
            for (node, x) in packers[r][s].positions(seg, rows[r].x_lo, rows[r].site_width) {
                out.x[node] = x + 0.5 * netlist.nodes[node].width;
                out.y[node] = rows[r].y + 0.5 * netlist.nodes[node].height;
                row_lists[r].push((node, x));
            }
        }
        row_lists[r].sort_by(|a, b| a.1.total_cmp(&b.1));
    }
    let displacement = (0..m)
        .map(|i| (out.x[i] - placement.x[i]).hypot(out.y[i] - placement.y[i]))
        .collect();
    Ok(RowAssignment {
        rows: row_lists,
        placement: out,
        displacement,
    })
}

/// Result of [`check_legality`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LegalityReport {
    pub violations: Vec<String>,
}

impl LegalityReport {
    pub fn is_legal(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every movable cell sits on a row boundary, inside the rows'
/// x extents, on the site grid, and overlaps no other cell or fixed node.
pub fn check_legality(
    netlist: &Netlist,
    region: &Region,
    placement: &PlacementState,
) -> LegalityReport {
    let mut report = LegalityReport::default();
    let m = netlist.num_movable();
    if placement.len() < m {
        report
            .violations
            .push(format!("placement has {} of {m} cells", placement.len()));
        return report;
    }
    let mut per_row: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); region.rows.len()];
    for i in 0..m {
        let node = &netlist.nodes[i];
        let r = node.rect_at((placement.x[i], placement.y[i]));
        let span = rows_spanned(region, r.y_lo, r.y_hi);
        let aligned = region
            .rows
            .get(span.start)
            .is_some_and(|row| (row.y - r.y_lo).abs() < 1e-6);
        let covered: f64 = region.rows[span.clone()].iter().map(|row| row.height).sum();
        if !aligned || covered + 1e-6 < r.height() {
            report
                .violations
                .push(format!("{} is not aligned to rows", node.name));
            continue;
        }
        for ri in span {
            let row = &region.rows[ri];
            if r.x_lo < row.x_lo - 1e-6 || r.x_hi > row.x_hi + 1e-6 {
                report
                    .violations
                    .push(format!("{} extends past row {ri}", node.name));
            }
            let k = (r.x_lo - row.x_lo) / row.site_width;
            if (k - k.round()).abs() > 1e-6 {
                report
                    .violations
                    .push(format!("{} is off the site grid", node.name));
            }
            per_row[ri].push((r.x_lo, r.x_hi, i));
        }
    }
    for n in netlist.fixed().iter().filter(|n| !n.non_image) {
        let r = n.rect();
        for ri in rows_spanned(region, r.y_lo, r.y_hi) {
            per_row[ri].push((r.x_lo, r.x_hi, n.id));
        }
    }
    for (ri, list) in per_row.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach: Option<(f64, usize)> = None;
        for &(lo, hi, id) in list.iter() {
            if let Some((end, other)) = reach {
                if lo < end - 1e-6 {
                    report.violations.push(format!(
                        "{} overlaps {} in row {ri}",
                        netlist.nodes[id].name, netlist.nodes[other].name
                    ));
                }
            }
            if reach.is_none_or(|(end, _)| hi > end) {
                reach = Some((hi, id));
            }
        }
    }
    report
}

/// Incremental HPWL over the nets touching a few cells.
struct NetCache<'a> {
    netlist: &'a Netlist,
    node_nets: Vec<Vec<usize>>,
}

impl NetCache<'_> {
    fn local(&self, placement: &PlacementState, cells: &[usize]) -> f64 {
        let mut nets: Vec<usize> = cells
            .iter()
            .flat_map(|&c| self.node_nets[c].iter().copied())
            .collect();
        nets.sort_unstable();
        nets.dedup();
        nets.iter()
            .map(|&n| net_hpwl(self.netlist, placement, self.netlist.nets[n].pins.clone()))
            .sum()
    }

    /// Median of the other pins' bounding-box edges on the nets of `cell`,
    /// as a target for the cell center.
    fn median_x(&self, placement: &PlacementState, cell: usize) -> Option<f64> {
        let mut bounds = Vec::new();
        for &n in &self.node_nets[cell] {
            let net = &self.netlist.nets[n];
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let mut offset = 0.0;
            for pin in self.netlist.net_pins(net) {
                if pin.node == cell {
                    offset = pin.offset.0;
                    continue;
                }
                let x = self.netlist.pin_position(pin, placement).0;
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if lo <= hi {
                bounds.push(lo - offset);
                bounds.push(hi - offset);
            }
        }
        if bounds.is_empty() {
            return None;
        }
        bounds.sort_by(f64::total_cmp);
        let k = bounds.len() / 2;
        Some(0.5 * (bounds[k - 1] + bounds[k]))
    }
}

/// Adjacent swaps and single-cell slides inside each row, kept only when
/// they strictly shorten HPWL. Runs until a pass makes no move or
/// `max_passes` is reached.
pub fn greedy_improve(
    assignment: &RowAssignment,
    netlist: &Netlist,
    region: &Region,
    max_passes: usize,
) -> RowAssignment {
    let mut a = assignment.clone();
    let cache = NetCache {
        netlist,
        node_nets: netlist.node_nets(),
    };
    let site = region.site_width();
    let blockers: Vec<Rect> = netlist
        .fixed()
        .iter()
        .filter(|n| !n.non_image)
        .map(|n| n.rect())
        .chain(
            (0..netlist.num_movable())
                .filter(|&i| is_multi_row(netlist, region, i))
                .map(|i| netlist.nodes[i].rect_at((a.placement.x[i], a.placement.y[i]))),
        )
        .collect();
    let segments = free_segments(region, &blockers);
    let seg_of = |r: usize, x: f64| -> Option<(f64, f64)> {
        segments[r]
            .iter()
            .find(|s| x >= s.lo - 1e-6 && x < s.hi)
            .map(|s| (s.lo, s.hi))
    };
    let width = |i: usize| netlist.nodes[i].width;

    for _ in 0..max_passes {
        let mut moved = false;
        for r in 0..a.rows.len() {
            let origin = region.rows[r].x_lo;
            // Swaps of neighbors in the same segment.
            for k in 0..a.rows[r].len().saturating_sub(1) {
                let (ca, xa) = a.rows[r][k];
                let (cb, xb) = a.rows[r][k + 1];
                if seg_of(r, xa).map(|s| s.0) != seg_of(r, xb).map(|s| s.0) {
                    continue;
                }
                let new_b = xa;
                let new_a = xb + width(cb) - width(ca);
                if (new_a - snap_nearest(new_a, origin, site)).abs() > 1e-6 {
                    continue;
                }
                let before = cache.local(&a.placement, &[ca, cb]);
                let saved = (a.placement.x[ca], a.placement.x[cb]);
                a.placement.x[ca] = new_a + 0.5 * width(ca);
                a.placement.x[cb] = new_b + 0.5 * width(cb);
                let after = cache.local(&a.placement, &[ca, cb]);
                if after < before - 1e-9 * before.abs().max(1.0) {
                    a.rows[r][k] = (cb, new_b);
                    a.rows[r][k + 1] = (ca, new_a);
                    moved = true;
                } else {
                    a.placement.x[ca] = saved.0;
                    a.placement.x[cb] = saved.1;
                }
            }
            // Slides into the free gap toward the median position.
            for k in 0..a.rows[r].len() {
                let (c, x) = a.rows[r][k];
                let Some((seg_lo, seg_hi)) = seg_of(r, x) else {
                    continue;
                };
                let left = if k > 0 {
                    let (p, px) = a.rows[r][k - 1];
                    (px + width(p)).max(seg_lo)
                } else {
                    seg_lo
                };
                let right = a.rows[r]
                    .get(k + 1)
                    .map_or(seg_hi, |&(_, nx)| nx.min(seg_hi));
                let Some(target) = cache.median_x(&a.placement, c) else {
                    continue;
                };
                let hi = snap_down(right - width(c), origin, site);
                let lo = snap_up(left, origin, site);
                if hi < lo {
                    continue;
                }
                let new_x = snap_nearest(target - 0.5 * width(c), origin, site).clamp(lo, hi);
                if (new_x - x).abs() < 1e-9 {
                    continue;
                }
                let before = cache.local(&a.placement, &[c]);
                let saved = a.placement.x[c];
                a.placement.x[c] = new_x + 0.5 * width(c);
                let after = cache.local(&a.placement, &[c]);
                if after < before - 1e-9 * before.abs().max(1.0) {
                    a.rows[r][k].1 = new_x;
                    moved = true;
                } else {
                    a.placement.x[c] = saved;
                }
            }
        }
        if !moved {
            break;
        }
    }
    a
}

/// Uniformly random legal placement: cells dropped at random points of the
/// region and legalized.
pub fn random_legal_placement(
    netlist: &Netlist,
    region: &Region,
    seed: u64,
) -> Result<RowAssignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bb = region.bbox;
    let m = netlist.num_movable();
    let mut p = PlacementState {
        x: Vec::with_capacity(m),
        y: Vec::with_capacity(m),
    };
    for _ in 0..m {
        p.x.push(rng.random_range(bb.x_lo..bb.x_hi));
        p.y.push(rng.random_range(bb.y_lo..bb.y_hi));
    }
    legalize(&p, netlist, region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Node, NodeKind, Row};
    use crate::wirelength::hpwl;

    fn cell(name: &str, w: f64, center: (f64, f64)) -> Node {
        Node {
            id: 0,
            name: name.into(),
            kind: NodeKind::Movable,
            width: w,
            height: 1.0,
            center,
            charge: w,
            non_image: false,
        }
    }

    fn rows(n: usize, len: f64) -> Region {
        Region::from_rows(
            (0..n)
                .map(|r| Row {
                    y: r as f64,
                    height: 1.0,
                    x_lo: 0.0,
                    x_hi: len,
                    site_width: 1.0,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn legal_input_is_unchanged() {
        let nodes = vec![
            cell("a", 2.0, (1.0, 0.5)),
            cell("b", 3.0, (5.5, 0.5)),
            cell("c", 1.0, (2.5, 1.5)),
        ];
        let nl = Netlist::new(nodes, vec![]).unwrap();
        let region = rows(2, 10.0);
        let p = nl.stored_placement();
        let a = legalize(&p, &nl, &region).unwrap();
        assert_eq!(a.placement, p);
        assert_eq!(a.total_displacement(), 0.0);
        assert!(check_legality(&nl, &region, &a.placement).is_legal());
    }

    #[test]
    fn coincident_cells_abut() {
        let nodes = vec![cell("a", 1.0, (4.5, 0.5)), cell("b", 1.0, (4.5, 0.5))];
        let nl = Netlist::new(nodes, vec![]).unwrap();
        let region = rows(1, 10.0);
        let a = legalize(&nl.stored_placement(), &nl, &region).unwrap();
        let mut xs = a.placement.x.clone();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs[1] - xs[0], 1.0);
        assert!(check_legality(&nl, &region, &a.placement).is_legal());
    }

    #[test]
    fn fixed_blockage_is_avoided() {
        let mut nodes = vec![cell("a", 2.0, (5.0, 0.5))];
        nodes.push(Node {
            kind: NodeKind::Fixed,
            ..cell("m", 4.0, (5.0, 0.5))
        });
        let nl = Netlist::new(nodes, vec![]).unwrap();
        let region = rows(1, 10.0);
        let a = legalize(&nl.stored_placement(), &nl, &region).unwrap();
        assert!(check_legality(&nl, &region, &a.placement).is_legal());
        let x = a.placement.x[0];
        assert!(x <= 2.0 || x >= 8.0, "x = {x}");
    }

    #[test]
    fn overfull_rows_are_infeasible() {
        let nodes = (0..4)
            .map(|i| cell(&format!("c{i}"), 3.0, (5.0, 0.5)))
            .collect();
        let nl = Netlist::new(nodes, vec![]).unwrap();
        let r = legalize(&nl.stored_placement(), &nl, &rows(1, 10.0));
        assert!(matches!(r, Err(PlaceError::Infeasible(_))));
    }

    #[test]
    fn checker_flags_overlap_and_misalignment() {
        let nodes = vec![cell("a", 2.0, (1.0, 0.5)), cell("b", 2.0, (2.0, 0.5))];
        let nl = Netlist::new(nodes, vec![]).unwrap();
        let region = rows(1, 10.0);
        assert!(!check_legality(&nl, &region, &nl.stored_placement()).is_legal());
        let p = PlacementState {
            x: vec![1.0, 5.0],
            y: vec![0.7, 0.5],
        };
        assert!(!check_legality(&nl, &region, &p).is_legal());
    }

    /// Exact minimum of the summed squared displacement for cells kept in
    /// target order on one integer-site row.
    fn ordered_optimum(targets: &[f64], widths: &[usize], len: usize) -> f64 {
        let mut best = vec![0.0f64; len + 1];
        for (t, &w) in targets.iter().zip(widths) {
            // next[p]: best cost with this cell ending at or before p.
            let mut next = vec![f64::INFINITY; len + 1];
            for end in w..=len {
                let start = end - w;
                let c = best[start] + (start as f64 - t).powi(2);
                next[end] = next[end - 1].min(c);
            }
            for p in 0..w {
                next[p] = f64::INFINITY;
            }
            best = next;
        }
        best[len]
    }

    #[test]
    fn single_row_displacement_near_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let len = 60usize;
        let widths: Vec<usize> = (0..20).map(|_| rng.random_range(1..=2)).collect();
        let mut targets: Vec<f64> = (0..20).map(|_| rng.random_range(10.0..40.0)).collect();
        targets.sort_by(f64::total_cmp);
        let nodes = targets
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (&t, &w))| cell(&format!("c{i}"), w as f64, (t + 0.5 * w as f64, 0.5)))
            .collect();
        let nl = Netlist::new(nodes, vec![]).unwrap();
        let region = rows(1, len as f64);
        let a = legalize(&nl.stored_placement(), &nl, &region).unwrap();
        assert!(check_legality(&nl, &region, &a.placement).is_legal());
        let ours: f64 = a.displacement.iter().map(|d| d * d).sum();
        let opt = ordered_optimum(&targets, &widths, len);
        assert!(ours <= 2.0 * opt + 1e-9, "ours {ours}, optimum {opt}");
    }

    fn chain() -> (Netlist, Region, RowAssignment) {
        // pad0 - a - b - c - d - pad1 with b and c in swapped slots.
        let mut nodes = vec![
            cell("a", 1.0, (2.5, 0.5)),
            cell("c", 1.0, (3.5, 0.5)),
            cell("b", 1.0, (4.5, 0.5)),
            cell("d", 1.0, (5.5, 0.5)),
        ];
        for (name, x) in [("p0", 0.5), ("p1", 9.5)] {
            nodes.push(Node {
                kind: NodeKind::Fixed,
                ..cell(name, 1.0, (x, 0.5))
            });
        }
        let o = (0.0, 0.0);
        let nets = vec![
            ("n0".into(), vec![(4, o), (0, o)]),
            ("n1".into(), vec![(0, o), (2, o)]),
            ("n2".into(), vec![(2, o), (1, o)]),
            ("n3".into(), vec![(1, o), (3, o)]),
            ("n4".into(), vec![(3, o), (5, o)]),
        ];
        let nl = Netlist::new(nodes, nets).unwrap();
        let region = rows(1, 10.0);
        let a = legalize(&nl.stored_placement(), &nl, &region).unwrap();
        (nl, region, a)
    }

    #[test]
    fn swap_restores_chain_order() {
        let (nl, region, a) = chain();
        let before = hpwl(&nl, &a.placement).unwrap().total;
        let b = greedy_improve(&a, &nl, &region, 10);
        let after = hpwl(&nl, &b.placement).unwrap().total;
        assert!(after < before, "{after} vs {before}");
        let c_node = nl.node_by_name("c").unwrap().id;
        let b_node = nl.node_by_name("b").unwrap().id;
        assert!(b.placement.x[b_node] < b.placement.x[c_node]);
        assert!(check_legality(&nl, &region, &b.placement).is_legal());
    }

    #[test]
    fn improvement_is_idempotent() {
        let (nl, region, a) = chain();
        let once = greedy_improve(&a, &nl, &region, 10);
        let twice = greedy_improve(&once, &nl, &region, 10);
        assert_eq!(once, twice);
    }

    #[test]
    fn local_optimum_is_kept() {
        let (nl, region, a) = chain();
        let opt = greedy_improve(&a, &nl, &region, 100);
        assert_eq!(greedy_improve(&opt, &nl, &region, 100), opt);
    }
}
