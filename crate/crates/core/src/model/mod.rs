//! Netlist, placement region and placement state.
//!
//! Node ids are laid out so that movable nodes occupy `0..num_movable()` and
//! fixed nodes follow. A [`PlacementState`] stores centers for the movable
//! nodes first and any filler cells after them, so index `i < m` of a
//! placement always refers to node id `i`.

pub mod bookshelf;
pub mod synth;

use std::collections::HashMap;

use crate::error::{PlaceError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Movable,
    Fixed,
    Filler,
    Dark,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub name: String,
    pub kind: NodeKind,
    pub width: f64,
    pub height: f64,
    /// Center; authoritative for fixed and dark nodes, the initial position
    /// for movable ones.
    pub center: (f64, f64),
    /// Electric charge. Node area for movable and filler nodes, area scaled by
    /// the target density for fixed and dark nodes.
    pub charge: f64,
    /// Bookshelf `terminal_NI`: connected, but does not block placement.
    pub non_image: bool,
}

impl Node {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn rect_at(&self, center: (f64, f64)) -> Rect {
        Rect::centered(center, self.width, self.height)
    }

    pub fn rect(&self) -> Rect {
        self.rect_at(self.center)
    }

    /// Charge for this node at target density `rho_t`.
    pub fn charge_for(kind: NodeKind, area: f64, rho_t: f64) -> f64 {
        match kind {
            NodeKind::Movable | NodeKind::Filler => area,
            NodeKind::Fixed | NodeKind::Dark => rho_t * area,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pin {
    pub node: usize,
    pub net: usize,
    /// Offset of the pin from the owning node's center.
    pub offset: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub id: usize,
    pub name: String,
    /// Range into [`Netlist::pins`].
    pub pins: std::ops::Range<usize>,
}

impl Net {
    pub fn degree(&self) -> usize {
        self.pins.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_lo: f64,
    pub y_lo: f64,
    pub x_hi: f64,
    pub y_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, y_lo: f64, x_hi: f64, y_hi: f64) -> Self {
        Rect {
            x_lo,
            y_lo,
            x_hi,
            y_hi,
        }
    }

    pub fn centered(center: (f64, f64), width: f64, height: f64) -> Self {
        Rect {
            x_lo: center.0 - 0.5 * width,
            y_lo: center.1 - 0.5 * height,
            x_hi: center.0 + 0.5 * width,
            y_hi: center.1 + 0.5 * height,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn overlap_area(&self, other: &Rect) -> f64 {
        let w = self.x_hi.min(other.x_hi) - self.x_lo.max(other.x_lo);
        let h = self.y_hi.min(other.y_hi) - self.y_lo.max(other.y_lo);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }
}

/// A placement row from the `.scl` file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub y: f64,
    pub height: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub site_width: f64,
}

impl Row {
    pub fn rect(&self) -> Rect {
        Rect::new(self.x_lo, self.y, self.x_hi, self.y + self.height)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub bbox: Rect,
    pub rows: Vec<Row>,
    /// Non-placeable rectangles inside `bbox`: the bounding box minus the
    /// union of the rows.
    pub dark_rects: Vec<Rect>,
}

impl Region {
    /// Builds a region whose bounding box is the hull of `rows`.
    pub fn from_rows(mut rows: Vec<Row>) -> Result<Self> {
        if rows.is_empty() {
            return Err(PlaceError::InvalidArgument("region has no rows".into()));
        }
        rows.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x_lo.total_cmp(&b.x_lo)));
        let bbox = rows.iter().fold(
            Rect::new(f64::MAX, f64::MAX, f64::MIN, f64::MIN),
            |acc, r| {
                Rect::new(
                    acc.x_lo.min(r.x_lo),
                    acc.y_lo.min(r.y),
                    acc.x_hi.max(r.x_hi),
                    acc.y_hi.max(r.y + r.height),
                )
            },
        );
        let dark_rects = dark_rects(&bbox, &rows);
        Ok(Region {
            bbox,
            rows,
            dark_rects,
        })
    }

    pub fn row_area(&self) -> f64 {
        self.rows.iter().map(|r| r.rect().area()).sum()
    }

    pub fn row_height(&self) -> f64 {
        self.rows.first().map_or(1.0, |r| r.height)
    }

    pub fn site_width(&self) -> f64 {
        self.rows.first().map_or(1.0, |r| r.site_width)
    }

    /// Dark rectangles as charged nodes at target density `rho_t`.
    pub fn dark_nodes(&self, rho_t: f64) -> Vec<Node> {
        self.dark_rects
            .iter()
            .enumerate()
            .map(|(i, r)| Node {
                id: i,
                name: format!("dark{i}"),
                kind: NodeKind::Dark,
                width: r.width(),
                height: r.height(),
                center: r.center(),
                charge: Node::charge_for(NodeKind::Dark, r.area(), rho_t),
                non_image: false,
            })
            .collect()
    }

    /// Clamp a node center so the node stays inside the bounding box.
    pub fn clamp_center(&self, center: (f64, f64), width: f64, height: f64) -> (f64, f64) {
        (
            clamp_axis(center.0, width, self.bbox.x_lo, self.bbox.x_hi),
            clamp_axis(center.1, height, self.bbox.y_lo, self.bbox.y_hi),
        )
    }
}

fn clamp_axis(c: f64, extent: f64, lo: f64, hi: f64) -> f64 {
    let lo_c = lo + 0.5 * extent;
    let hi_c = hi - 0.5 * extent;
    if lo_c > hi_c {
        0.5 * (lo + hi)
    } else {
        c.clamp(lo_c, hi_c)
    }
}

/// Sweep-line subtraction of the row union from `bbox`: every horizontal band
/// between consecutive row edges contributes the gaps in its row cover, and
/// vertically adjacent identical gaps are merged.
fn dark_rects(bbox: &Rect, rows: &[Row]) -> Vec<Rect> {
    let mut ys: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.y, r.y + r.height])
        .chain([bbox.y_lo, bbox.y_hi])
        .collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();

    let mut out: Vec<Rect> = Vec::new();
    // Rects from the previous band that may still be extended upward.
    let mut open: Vec<usize> = Vec::new();
    for band in ys.windows(2) {
        let (lo, hi) = (band[0], band[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let mut cover: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.y <= mid && mid < r.y + r.height)
            .map(|r| (r.x_lo, r.x_hi))
            .collect();
        cover.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut gaps = Vec::new();
        let mut cursor = bbox.x_lo;
        for (a, b) in cover {
            if a > cursor {
                gaps.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < bbox.x_hi {
            gaps.push((cursor, bbox.x_hi));
        }

        let mut next_open = Vec::new();
        for (a, b) in gaps {
            let extend = open.iter().copied().find(|&k| {
                let r = &out[k];
                r.x_lo == a && r.x_hi == b && r.y_hi == lo
            });
            match extend {
                Some(k) => {
                    out[k].y_hi = hi;
                    next_open.push(k);
                }
                None => {
                    out.push(Rect::new(a, lo, b, hi));
                    next_open.push(out.len() - 1);
                }
            }
        }
        open = next_open;
    }
    out
}

/// Net name and its pins as `(node index, pin offset)`.
pub type NetSpec = (String, Vec<(usize, (f64, f64))>);

#[derive(Debug, Clone, Default)]
pub struct Netlist {
    pub nodes: Vec<Node>,
    pub nets: Vec<Net>,
    /// Pins grouped by net.
    pub pins: Vec<Pin>,
    num_movable: usize,
    names: HashMap<String, usize>,
}

impl Netlist {
    /// Assembles a netlist. Movable nodes are renumbered to come first;
    /// `nets` lists, per net, its name and `(node index in input, offset)`.
    pub fn new(nodes: Vec<Node>, nets: Vec<NetSpec>) -> Result<Self> {
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&i| (nodes[i].kind != NodeKind::Movable, i));
        let mut remap = vec![0usize; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let mut slots: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
        let mut sorted = Vec::with_capacity(slots.len());
        for (new, &old) in order.iter().enumerate() {
            let mut node = slots[old].take().expect("each node moved once");
            node.id = new;
            sorted.push(node);
        }
        let num_movable = sorted
            .iter()
            .take_while(|n| n.kind == NodeKind::Movable)
            .count();

        let mut pins = Vec::new();
        let mut net_list = Vec::with_capacity(nets.len());
        for (id, (name, members)) in nets.into_iter().enumerate() {
            let start = pins.len();
            for (node, offset) in members {
                let node = *remap.get(node).ok_or_else(|| {
                    PlaceError::InvalidArgument(format!("net {name} references node {node}"))
                })?;
                pins.push(Pin {
                    node,
                    net: id,
                    offset,
                });
            }
            net_list.push(Net {
                id,
                name,
                pins: start..pins.len(),
            });
        }
        let names = sorted.iter().map(|n| (n.name.clone(), n.id)).collect();
        Ok(Netlist {
            nodes: sorted,
            nets: net_list,
            pins,
            num_movable,
            names,
        })
    }

    pub fn num_movable(&self) -> usize {
        self.num_movable
    }

    pub fn movable(&self) -> &[Node] {
        &self.nodes[..self.num_movable]
    }

    pub fn fixed(&self) -> &[Node] {
        &self.nodes[self.num_movable..]
    }

    pub fn node_by_name(&self, name: &str) -> Option<&Node> {
        self.names.get(name).map(|&i| &self.nodes[i])
    }

    pub fn net_pins(&self, net: &Net) -> &[Pin] {
        &self.pins[net.pins.clone()]
    }

    pub fn movable_area(&self) -> f64 {
        self.movable().iter().map(Node::area).sum()
    }

    /// Recomputes every charge for target density `rho_t`.
    pub fn apply_target_density(&mut self, rho_t: f64) {
        for n in &mut self.nodes {
            n.charge = Node::charge_for(n.kind, n.area(), rho_t);
        }
    }

    /// Per-node list of incident net ids.
    pub fn node_nets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for pin in &self.pins {
            let list: &mut Vec<usize> = &mut out[pin.node];
            if list.last() != Some(&pin.net) {
                list.push(pin.net);
            }
        }
        out
    }

    /// Center of `node` under `placement`.
    #[inline]
    pub fn center(&self, node: usize, placement: &PlacementState) -> (f64, f64) {
        if node < self.num_movable {
            (placement.x[node], placement.y[node])
        } else {
            self.nodes[node].center
        }
    }

    #[inline]
    pub fn pin_position(&self, pin: &Pin, placement: &PlacementState) -> (f64, f64) {
        let c = self.center(pin.node, placement);
        (c.0 + pin.offset.0, c.1 + pin.offset.1)
    }

    /// Placement holding each movable node's stored center.
    pub fn stored_placement(&self) -> PlacementState {
        PlacementState {
            x: self.movable().iter().map(|n| n.center.0).collect(),
            y: self.movable().iter().map(|n| n.center.1).collect(),
        }
    }

    /// Checks the structural invariants: pins resolve, offsets stay inside the
    /// owning node, nets are non-empty, sizes positive.
    pub fn validate(&self) -> Result<()> {
        for n in &self.nodes {
            if !(n.width > 0.0 && n.height > 0.0) && n.kind == NodeKind::Movable {
                return Err(PlaceError::InvalidArgument(format!(
                    "node {} has non-positive size",
                    n.name
                )));
            }
        }
        for net in &self.nets {
            if net.degree() == 0 {
                return Err(PlaceError::InvalidArgument(format!(
                    "net {} is empty",
                    net.name
                )));
            }
            for pin in self.net_pins(net) {
                let node = self.nodes.get(pin.node).ok_or_else(|| {
                    PlaceError::InvalidArgument(format!("net {} has dangling pin", net.name))
                })?;
                if pin.net != net.id {
                    return Err(PlaceError::InvalidArgument(format!(
                        "pin of net {} is filed under net {}",
                        net.name, pin.net
                    )));
                }
                let tol = 1e-9;
                if pin.offset.0.abs() > 0.5 * node.width + tol
                    || pin.offset.1.abs() > 0.5 * node.height + tol
                {
                    return Err(PlaceError::InvalidArgument(format!(
                        "pin of net {} lies outside node {}",
                        net.name, node.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Centers of movable nodes followed by filler cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlacementState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PlacementState {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Drops everything past the first `m` entries (the fillers).
    pub fn truncated(&self, m: usize) -> PlacementState {
        PlacementState {
            x: self.x[..m].to_vec(),
            y: self.y[..m].to_vec(),
        }
    }
}
