//! Global placement: smoothed wirelength plus a penalized electrostatic
//! energy, minimized by nonlinear conjugate gradient with self-adjusting
//! penalty, step bounds and smoothing.
//!
//! Vectors handed to the optimizer are flat: all x coordinates of the
//! moving cells (movable nodes, then fillers) followed by all y coordinates.

pub mod cg;
pub mod schedule;
pub mod trace;

use std::path::PathBuf;

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::density::{self, DensityGrid, DensityModel, FillerSet};
use crate::error::{PlaceError, Result};
use crate::grid::GridGeometry;
use crate::model::{Netlist, PlacementState, Region};
use crate::poisson::{FieldMaps, SpectralSolver};
use crate::wirelength;

pub use cg::{cg_step, CgState, StepBounds, StepOutcome};
pub use schedule::{update_schedules, ScheduleState};
pub use trace::IterationTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlobalConfig {
    pub target_density: f64,
    pub max_iters: usize,
    pub tau_stop: f64,
    pub delta_w_ref: f64,
    /// Grid dimension override; must be a power of two.
    pub grid: Option<usize>,
    /// Seed for filler positions.
    pub seed: u64,
    /// Iterations whose density and field maps are kept (0 = start).
    pub snapshot_iters: Vec<usize>,
    /// Also keep the maps of the last iteration.
    pub snapshot_final: bool,
    pub trace_path: Option<PathBuf>,
    pub line_search: ProbeEnergy,
}

/// How line-search probes obtain the energy term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeEnergy {
    /// Rebuild the density and re-solve the field at every probe.
    #[default]
    Exact,
    /// Extrapolate linearly with the field frozen at the current point.
    /// Cheaper, but overshoot goes unseen and steps can run away.
    Frozen,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        GlobalConfig {
            target_density: 1.0,
            max_iters: 1000,
            tau_stop: 0.10,
            delta_w_ref: schedule::DELTA_W_REF,
            grid: None,
            seed: 1,
            snapshot_iters: Vec::new(),
            snapshot_final: false,
            trace_path: None,
            line_search: ProbeEnergy::Exact,
        }
    }
}

impl GlobalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_density > 0.0 && self.target_density <= 1.0) {
            return Err(PlaceError::InvalidArgument(format!(
                "target density {} outside (0, 1]",
                self.target_density
            )));
        }
        if self.max_iters == 0 || self.max_iters > 1000 {
            return Err(PlaceError::InvalidArgument(format!(
                "max_iters must be in 1..=1000, got {}",
                self.max_iters
            )));
        }
        if let Some(n) = self.grid {
            if n == 0 || !n.is_power_of_two() || n > density::MAX_GRID_DIM {
                return Err(PlaceError::InvalidArgument(format!(
                    "grid dimension {n} must be a power of two up to {}",
                    density::MAX_GRID_DIM
                )));
            }
        }
        if self.delta_w_ref.is_nan() || self.delta_w_ref <= 0.0 {
            return Err(PlaceError::InvalidArgument(
                "delta_w_ref must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Everything evaluated at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub f: f64,
    pub wa: f64,
    pub energy: f64,
    pub wl_grad: Vec<f64>,
    pub energy_grad: Vec<f64>,
    /// `wl_grad + lambda * energy_grad`.
    pub grad: Vec<f64>,
    pub density: DensityGrid,
    pub field: FieldMaps,
}

/// Objective `f = W + lambda N` over movable cells and fillers.
pub struct Objective<'a> {
    pub netlist: &'a Netlist,
    pub region: &'a Region,
    pub density: DensityModel,
    solver: SpectralSolver,
    sizes: Vec<(f64, f64)>,
}

impl<'a> Objective<'a> {
    pub fn new(
        netlist: &'a Netlist,
        region: &'a Region,
        fillers: &FillerSet,
        geom: GridGeometry,
        rho_t: f64,
    ) -> Result<Self> {
        let density = DensityModel::new(netlist, region, fillers, geom, rho_t)?;
        let solver = SpectralSolver::new(geom.n)?;
        let sizes = (0..density.num_cells())
            .map(|i| density.cell_size(i))
            .collect();
        Ok(Objective {
            netlist,
            region,
            density,
            solver,
            sizes,
        })
    }

    pub fn geom(&self) -> GridGeometry {
        self.density.geom
    }

    pub fn num_cells(&self) -> usize {
        self.sizes.len()
    }

    /// Clamps every cell of a flat vector into the region.
    pub fn project(&self, flat: &mut [f64]) {
        let n = self.sizes.len();
        let (xs, ys) = flat.split_at_mut(n);
        for (i, &(w, h)) in self.sizes.iter().enumerate() {
            let c = self.region.clamp_center((xs[i], ys[i]), w, h);
            xs[i] = c.0;
            ys[i] = c.1;
        }
    }

    /// `f` alone, with the density rebuilt and the field re-solved.
    pub fn value(&self, placement: &PlacementState, lambda: f64, gamma: f64) -> Result<f64> {
        let wa = wirelength::wa_total(self.netlist, placement, gamma)?;
        let density = self.density.build_density(placement)?;
        let field = self.solver.solve(&density)?;
        Ok(wa + lambda * self.density.potential_energy(&field, placement)?)
    }

    pub fn evaluate(
        &self,
        placement: &PlacementState,
        lambda: f64,
        gamma: f64,
    ) -> Result<Evaluation> {
        let n = self.num_cells();
        let wl = wirelength::wa_wirelength(self.netlist, placement, gamma)?;
        let (gx, gy) = wl.gradient.expect("gradient requested");
        let mut wl_grad = gx;
        wl_grad.extend_from_slice(&gy);

        let density = self.density.build_density(placement)?;
        let field = self.solver.solve(&density)?;
        let energy = self.density.potential_energy(&field, placement)?;
        let samples = self.density.sample_cells(&field, placement)?;
        let geom = self.geom();
        // N counts every pair twice, so dN/dx_i = -2 q_i E_i; E is in bin
        // units and is converted to length units here.
        let mut energy_grad = vec![0.0; 2 * n];
        for (i, s) in samples.iter().enumerate() {
            let q = self.density.charge(i);
            energy_grad[i] = -2.0 * q * s.ex / geom.w_b;
            energy_grad[n + i] = -2.0 * q * s.ey / geom.h_b;
        }
        let grad = wl_grad
            .iter()
            .zip(&energy_grad)
            .map(|(w, e)| w + lambda * e)
            .collect();
        Ok(Evaluation {
            f: wl.total + lambda * energy,
            wa: wl.total,
            energy,
            wl_grad,
            energy_grad,
            grad,
            density,
            field,
        })
    }
}

/// `f` and its gradient at `placement`.
pub fn objective_and_gradient(
    objective: &Objective,
    placement: &PlacementState,
    lambda: f64,
    gamma: f64,
) -> Result<(f64, Vec<f64>)> {
    let e = objective.evaluate(placement, lambda, gamma)?;
    Ok((e.f, e.grad))
}

/// Penalty that balances the two gradient terms in the 1-norm.
pub fn initial_lambda(eval: &Evaluation) -> f64 {
    let wl: f64 = eval.wl_grad.iter().map(|g| g.abs()).sum();
    let en: f64 = eval.energy_grad.iter().map(|g| g.abs()).sum();
    if en > 0.0 && wl > 0.0 {
        wl / en
    } else {
        1.0
    }
}

pub fn to_flat(p: &PlacementState) -> Vec<f64> {
    let mut v = p.x.clone();
    v.extend_from_slice(&p.y);
    v
}

pub fn from_flat(v: &[f64]) -> PlacementState {
    let n = v.len() / 2;
    PlacementState {
        x: v[..n].to_vec(),
        y: v[n..].to_vec(),
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub k: usize,
    pub density: DensityGrid,
    pub field: FieldMaps,
}

#[derive(Debug, Clone)]
pub struct GlobalResult {
    /// Movable cells followed by fillers.
    pub placement: PlacementState,
    pub num_movable: usize,
    pub fillers: FillerSet,
    pub trace: Vec<IterationTrace>,
    pub converged: bool,
    /// Iteration whose placement is returned.
    pub best_k: usize,
    pub tau: f64,
    pub lambda0: f64,
    pub geom: GridGeometry,
    pub snapshots: Vec<Snapshot>,
}

impl GlobalResult {
    /// Movable cells only.
    pub fn movable_placement(&self) -> PlacementState {
        self.placement.truncated(self.num_movable)
    }
}

/// Runs the global placement loop from `initial` (movable cells only).
pub fn global_place(
    netlist: &Netlist,
    region: &Region,
    initial: &PlacementState,
    config: &GlobalConfig,
) -> Result<GlobalResult> {
    config.validate()?;
    let m = netlist.num_movable();
    if initial.len() != m {
        return Err(PlaceError::InvalidArgument(format!(
            "initial placement has {} cells, netlist has {m} movable",
            initial.len()
        )));
    }
    if !initial.is_finite() {
        return Err(PlaceError::NonFinite("initial placement".into()));
    }
    let rho_t = config.target_density;
    let fillers = density::insert_fillers(netlist, region, rho_t, config.seed);
    let n = config.grid.unwrap_or_else(|| density::choose_grid_dim(m));
    let geom = GridGeometry::covering(&region.bbox, n);
    let obj = Objective::new(netlist, region, &fillers, geom, rho_t)?;
    info!(
        "global placement: {m} cells, {} fillers, {n}x{n} grid",
        fillers.len()
    );

    let mut x = to_flat(&fillers.append_to(initial));
    obj.project(&mut x);
    let mut placement = from_flat(&x);

    let tau0 = obj.density.overflow(&placement)?.tau;
    let gamma0 = schedule::smoothing_for(tau0, geom.w_b);
    let mut eval = obj.evaluate(&placement, 0.0, gamma0)?;
    let lambda0 = initial_lambda(&eval);
    eval.grad = eval
        .wl_grad
        .iter()
        .zip(&eval.energy_grad)
        .map(|(w, e)| w + lambda0 * e)
        .collect();
    eval.f = eval.wa + lambda0 * eval.energy;
    let mut sched = ScheduleState::initial(lambda0, tau0, geom.w_b, config.delta_w_ref);
    let mut w_prev = wirelength::hpwl(netlist, &placement.truncated(m))?.total;

    let mut snapshots = Vec::new();
    if config.snapshot_iters.contains(&0) {
        snapshots.push(Snapshot {
            k: 0,
            density: eval.density.clone(),
            field: eval.field.clone(),
        });
    }

    let mut trace = Vec::new();
    let mut cg = CgState::new();
    let mut best = (f64::INFINITY, 0usize, x.clone());
    let mut converged = false;
    for k in 1..=config.max_iters {
        let bounds = StepBounds {
            alpha_max: sched.alpha_max,
            alpha_min: sched.alpha_min,
        };
        let x_prev = x.clone();
        let (lambda, gamma) = (sched.lambda, sched.gamma);
        let eg = &eval.energy_grad;
        let probe = |t: &[f64]| -> Result<f64> {
            if config.line_search == ProbeEnergy::Exact {
                return obj.value(&from_flat(t), lambda, gamma);
            }
            let wa = wirelength::wa_total(netlist, &from_flat(t), gamma)?;
            let de: f64 = t
                .iter()
                .zip(&x_prev)
                .zip(eg)
                .map(|((ti, xi), g)| g * (ti - xi))
                .sum();
            Ok(wa + lambda * (eval.energy + de))
        };
        let step = cg_step(&mut x, eval.f, &eval.grad, &mut cg, bounds, probe, |t| {
            obj.project(t)
        })?;
        placement = from_flat(&x);

        let w_k = wirelength::hpwl(netlist, &placement.truncated(m))?.total;
        let tau_k = obj.density.overflow(&placement)?.tau;
        sched = update_schedules(&sched, w_k, w_prev, tau_k, step.alpha);
        w_prev = w_k;
        eval = obj.evaluate(&placement, sched.lambda, sched.gamma)?;

        trace.push(IterationTrace {
            k,
            hpwl: w_k,
            wa: eval.wa,
            energy: eval.energy,
            tau: tau_k,
            lambda: sched.lambda,
            gamma: sched.gamma,
            alpha: step.alpha,
        });
        debug!(
            "k={k} hpwl={w_k:.4e} tau={tau_k:.4} lambda={:.3e} alpha={:.3e} probes={}",
            sched.lambda, step.alpha, step.probes
        );
        if config.snapshot_iters.contains(&k) {
            snapshots.push(Snapshot {
                k,
                density: eval.density.clone(),
                field: eval.field.clone(),
            });
        }
        if tau_k < best.0 {
            best = (tau_k, k, x.clone());
        }
        if tau_k <= config.tau_stop {
            converged = true;
            break;
        }
    }

    let last_k = trace.last().map_or(0, |t| t.k);
    if config.snapshot_final && snapshots.last().is_none_or(|s| s.k != last_k) {
        snapshots.push(Snapshot {
            k: last_k,
            density: eval.density.clone(),
            field: eval.field.clone(),
        });
    }
    let (tau, best_k, best_x) = if converged {
        (trace.last().map_or(tau0, |t| t.tau), trace.len(), x)
    } else {
        warn!(
            "global placement stopped after {} iterations with tau = {:.4}; returning iteration {}",
            trace.len(),
            best.0,
            best.1
        );
        best
    };
    if let Some(path) = &config.trace_path {
        trace::write_jsonl(&trace, path)?;
    }
    info!(
        "global placement done: {} iterations, tau = {tau:.4}",
        trace.len()
    );
    Ok(GlobalResult {
        placement: from_flat(&best_x),
        num_movable: m,
        fillers,
        trace,
        converged,
        best_k,
        tau,
        lambda0,
        geom,
        snapshots,
    })
}
