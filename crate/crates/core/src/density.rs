//! Charge rasterization, filler synthesis, potential energy and overflow.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PlaceError, Result};
use crate::grid::GridGeometry;
use crate::model::{Netlist, Node, NodeKind, PlacementState, Rect, Region};
use crate::poisson::{FieldMaps, FieldSample};

/// Largest grid dimension the placer will use.
pub const MAX_GRID_DIM: usize = 1024;

/// Filler area used when there are no movable cells to size fillers from.
pub const FALLBACK_FILLER_AREA: f64 = 1.0;

/// Smallest power of two whose square is at least `m`, capped at 1024.
pub fn choose_grid_dim(m: usize) -> usize {
    let mut n = 1usize;
    while n * n < m && n < MAX_GRID_DIM {
        n *= 2;
    }
    n
}

/// Bin densities: charge per bin area.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub geom: GridGeometry,
    pub rho: Vec<f64>,
    pub dc_removed: bool,
}

impl DensityGrid {
    pub fn zeros(geom: GridGeometry) -> Self {
        DensityGrid {
            geom,
            rho: vec![0.0; geom.num_bins()],
            dc_removed: false,
        }
    }

    /// Total charge on the grid (sum of density times bin area).
    pub fn total_charge(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.geom.bin_area()
    }

    /// Subtracts the mean over all bins.
    pub fn remove_dc(&mut self) {
        let mean = self.rho.iter().sum::<f64>() / self.rho.len() as f64;
        self.rho.iter_mut().for_each(|v| *v -= mean);
        self.dc_removed = true;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverflowReport {
    pub tau: f64,
    pub overflowed_area: f64,
}

/// Disconnected cells that soak up whitespace.
#[derive(Debug, Clone, Default)]
pub struct FillerSet {
    pub nodes: Vec<Node>,
    pub centers: Vec<(f64, f64)>,
}

impl FillerSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.nodes.iter().map(Node::area).sum()
    }

    /// `placement` (movable cells only) with the filler centers appended.
    pub fn append_to(&self, placement: &PlacementState) -> PlacementState {
        let mut out = placement.clone();
        out.x.extend(self.centers.iter().map(|c| c.0));
        out.y.extend(self.centers.iter().map(|c| c.1));
        out
    }
}

/// Row area not covered by fixed nodes.
pub fn whitespace_area(netlist: &Netlist, region: &Region) -> f64 {
    let blocked: f64 = netlist
        .fixed()
        .iter()
        .filter(|n| !n.non_image)
        .map(|n| {
            let r = n.rect();
            region
                .rows
                .iter()
                .map(|row| row.rect().overlap_area(&r))
                .sum::<f64>()
        })
        .sum();
    (region.row_area() - blocked).max(0.0)
}

/// Mean area of the movable cells between the 5th and 95th area percentiles.
fn filler_area(netlist: &Netlist) -> f64 {
    let mut areas: Vec<f64> = netlist.movable().iter().map(Node::area).collect();
    if areas.is_empty() {
        return FALLBACK_FILLER_AREA;
    }
    areas.sort_by(f64::total_cmp);
    let len = areas.len();
    let lo = (0.05 * len as f64).floor() as usize;
    let hi = ((0.95 * len as f64).ceil() as usize).clamp(lo + 1, len);
    let band = &areas[lo..hi];
    band.iter().sum::<f64>() / band.len() as f64
}

/// Square fillers totalling `rho_t * whitespace - movable area`, scattered
/// uniformly over the rows.
pub fn insert_fillers(netlist: &Netlist, region: &Region, rho_t: f64, seed: u64) -> FillerSet {
    let budget = rho_t * whitespace_area(netlist, region) - netlist.movable_area();
    if budget <= 0.0 {
        log::warn!("no room for fillers (budget {budget:.3})");
        return FillerSet::default();
    }
    let area = filler_area(netlist);
    let side = area.sqrt();
    let count = (budget / area).floor() as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths: Vec<f64> = region.rows.iter().map(|r| r.x_hi - r.x_lo).collect();
    let total: f64 = lengths.iter().sum();
    let mut nodes = Vec::with_capacity(count);
    let mut centers = Vec::with_capacity(count);
    for i in 0..count {
        let mut pick = rng.random::<f64>() * total;
        let mut row = &region.rows[region.rows.len() - 1];
        for (r, len) in region.rows.iter().zip(&lengths) {
            if pick < *len {
                row = r;
                break;
            }
            pick -= len;
        }
        let x = row.x_lo + rng.random::<f64>() * (row.x_hi - row.x_lo);
        let y = row.y + 0.5 * row.height;
        centers.push(region.clamp_center((x, y), side, side));
        nodes.push(Node {
            id: i,
            name: format!("filler{i}"),
            kind: NodeKind::Filler,
            width: side,
            height: side,
            center: (x, y),
            charge: area,
            non_image: false,
        });
    }
    FillerSet { nodes, centers }
}

/// Per-run charge model: static charges from fixed and dark nodes, and the
/// sizes of the cells that move (movable cells, then fillers).
#[derive(Debug, Clone)]
pub struct DensityModel {
    pub geom: GridGeometry,
    pub rho_t: f64,
    /// `(width, height, charge / area)` per moving cell.
    cells: Vec<(f64, f64, f64)>,
    charges: Vec<f64>,
    num_movable: usize,
    static_rho: Vec<f64>,
    static_charge: f64,
    /// `rho_t * (bin area - blocked area)` per bin, in absolute area.
    capacity: Vec<f64>,
    movable_area: f64,
}

impl DensityModel {
    pub fn new(
        netlist: &Netlist,
        region: &Region,
        fillers: &FillerSet,
        geom: GridGeometry,
        rho_t: f64,
    ) -> Result<Self> {
        if !(rho_t > 0.0 && rho_t <= 1.0) {
            return Err(PlaceError::InvalidArgument(format!(
                "target density {rho_t} outside (0, 1]"
            )));
        }
        let cells: Vec<(f64, f64, f64)> = netlist
            .movable()
            .iter()
            .chain(&fillers.nodes)
            .map(|n| {
                let q = Node::charge_for(n.kind, n.area(), rho_t);
                (n.width, n.height, q / n.area())
            })
            .collect();
        let charges = netlist
            .movable()
            .iter()
            .chain(&fillers.nodes)
            .map(|n| Node::charge_for(n.kind, n.area(), rho_t))
            .collect();

        let bin_area = geom.bin_area();
        let mut static_rho = vec![0.0; geom.num_bins()];
        let mut blocked = vec![0.0; geom.num_bins()];
        let mut static_charge = 0.0;
        let obstacles = netlist
            .fixed()
            .iter()
            .filter(|n| !n.non_image)
            .map(|n| n.rect())
            .chain(region.dark_rects.iter().copied());
        for rect in obstacles {
            let q = Node::charge_for(NodeKind::Fixed, rect.area(), rho_t);
            if rect.area() <= 0.0 {
                continue;
            }
            let scale = q / rect.area();
            geom.visit_overlaps(&rect, |b, w| {
                static_rho[b] += scale * w;
                blocked[b] += w * bin_area;
                static_charge += scale * w * bin_area;
            });
        }
        let capacity = blocked
            .iter()
            .map(|&blk| rho_t * (bin_area - blk.min(bin_area)))
            .collect();

        Ok(DensityModel {
            geom,
            rho_t,
            cells,
            charges,
            num_movable: netlist.num_movable(),
            static_rho,
            static_charge,
            capacity,
            movable_area: netlist.movable_area(),
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_movable(&self) -> usize {
        self.num_movable
    }

    /// Charge of moving cell `i`.
    pub fn charge(&self, i: usize) -> f64 {
        self.charges[i]
    }

    pub fn cell_size(&self, i: usize) -> (f64, f64) {
        (self.cells[i].0, self.cells[i].1)
    }

    /// Charge from fixed and dark nodes that lands on the grid.
    pub fn static_charge(&self) -> f64 {
        self.static_charge
    }

    /// Total charge of the moving cells.
    pub fn moving_charge(&self) -> f64 {
        self.charges.iter().sum()
    }

    fn cell_rect(&self, i: usize, placement: &PlacementState) -> Rect {
        let (w, h, _) = self.cells[i];
        Rect::centered((placement.x[i], placement.y[i]), w, h)
    }

    fn check_len(&self, placement: &PlacementState) -> Result<()> {
        if placement.len() != self.cells.len() {
            return Err(PlaceError::InvalidArgument(format!(
                "placement has {} cells, density model expects {}",
                placement.len(),
                self.cells.len()
            )));
        }
        Ok(())
    }

    /// Density before DC removal.
    pub fn rasterize(&self, placement: &PlacementState) -> Result<DensityGrid> {
        self.check_len(placement)?;
        let mut grid = DensityGrid {
            geom: self.geom,
            rho: self.static_rho.clone(),
            dc_removed: false,
        };
        for i in 0..self.cells.len() {
            let scale = self.cells[i].2;
            let mut hit = false;
            self.geom
                .visit_overlaps(&self.cell_rect(i, placement), |b, w| {
                    grid.rho[b] += scale * w;
                    hit = true;
                });
            if !hit {
                return Err(PlaceError::OutsideGrid { node: i });
            }
        }
        Ok(grid)
    }

    /// Density with the mean removed, ready for the Poisson solve.
    pub fn build_density(&self, placement: &PlacementState) -> Result<DensityGrid> {
        let mut grid = self.rasterize(placement)?;
        grid.remove_dc();
        Ok(grid)
    }

    /// Field values at every moving cell.
    pub fn sample_cells(
        &self,
        field: &FieldMaps,
        placement: &PlacementState,
    ) -> Result<Vec<FieldSample>> {
        self.check_len(placement)?;
        (0..self.cells.len())
            .map(|i| {
                field
                    .sample(&self.cell_rect(i, placement))
                    .map_err(|_| PlaceError::OutsideGrid { node: i })
            })
            .collect()
    }

    /// `N = sum_i q_i psi_i` over movable, filler, fixed and dark nodes.
    pub fn potential_energy(&self, field: &FieldMaps, placement: &PlacementState) -> Result<f64> {
        self.check_len(placement)?;
        let bin_area = self.geom.bin_area();
        let fixed: f64 = self
            .static_rho
            .iter()
            .zip(&field.psi)
            .map(|(r, p)| r * p)
            .sum::<f64>()
            * bin_area;
        let mut moving = 0.0;
        for i in 0..self.cells.len() {
            let scale = self.cells[i].2;
            let mut acc = 0.0;
            self.geom
                .visit_overlaps(&self.cell_rect(i, placement), |b, w| {
                    acc += w * field.psi[b]
                });
            moving += scale * acc * bin_area;
        }
        Ok(fixed + moving)
    }

    /// Overflow of the movable cells (fillers excluded) against
    /// `rho_t` times the unblocked bin area.
    pub fn overflow(&self, placement: &PlacementState) -> Result<OverflowReport> {
        if placement.len() < self.num_movable {
            return Err(PlaceError::InvalidArgument("placement too short".into()));
        }
        if self.movable_area <= 0.0 {
            return Err(PlaceError::InvalidArgument("no movable area".into()));
        }
        let bin_area = self.geom.bin_area();
        let mut usage = vec![0.0; self.geom.num_bins()];
        for i in 0..self.num_movable {
            self.geom
                .visit_overlaps(&self.cell_rect(i, placement), |b, w| {
                    usage[b] += w * bin_area
                });
        }
        let over: f64 = usage
            .iter()
            .zip(&self.capacity)
            .map(|(u, c)| (u - c).max(0.0))
            .sum();
        Ok(OverflowReport {
            tau: over / self.movable_area,
            overflowed_area: over,
        })
    }
}
