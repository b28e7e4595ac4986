//! Polak-Ribiere-plus conjugate gradient step with a bounded backtracking
//! line search.

use crate::error::{PlaceError, Result};

pub const ARMIJO_C1: f64 = 1e-4;
pub const RESTART_EVERY: usize = 50;

#[derive(Debug, Clone, Default)]
pub struct CgState {
    prev_grad: Vec<f64>,
    prev_dir: Vec<f64>,
    since_restart: usize,
}

impl CgState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forget the search history; the next step is steepest descent.
    pub fn reset(&mut self) {
        self.prev_grad.clear();
        self.prev_dir.clear();
        self.since_restart = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    pub alpha_max: f64,
    pub alpha_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub alpha: f64,
    /// Objective value reported by the accepted probe.
    pub f_probe: f64,
    pub probes: usize,
    pub restarted: bool,
    /// Whether the Armijo condition held (false when the floor was taken).
    pub sufficient_decrease: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Moves `x` along the PR+ direction built from `grad` and the previous
/// direction. The direction is scaled to unit infinity norm so `alpha` is a
/// distance. Starting at `alpha_max` the step is halved until
/// `probe(x + alpha d) <= f0 + c1 alpha grad.d`; once `alpha` drops below
/// `alpha_min`, `alpha_min` is taken. `project` maps a trial point back into
/// the feasible box.
pub fn cg_step(
    x: &mut [f64],
    f0: f64,
    grad: &[f64],
    state: &mut CgState,
    bounds: StepBounds,
    mut probe: impl FnMut(&[f64]) -> Result<f64>,
    project: impl Fn(&mut [f64]),
) -> Result<StepOutcome> {
    if !(bounds.alpha_max > 0.0 && bounds.alpha_min > 0.0) {
        return Err(PlaceError::InvalidArgument(
            "step bounds must be positive".into(),
        ));
    }
    if grad.len() != x.len() {
        return Err(PlaceError::InvalidArgument(
            "gradient length mismatch".into(),
        ));
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(PlaceError::NonFinite("gradient".into()));
    }
    let g_inf = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if g_inf == 0.0 {
        return Ok(StepOutcome {
            alpha: bounds.alpha_min,
            f_probe: f0,
            probes: 0,
            restarted: false,
            sufficient_decrease: true,
        });
    }

    let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut restarted = true;
    if !state.prev_grad.is_empty() && state.since_restart < RESTART_EVERY {
        let gg_prev = dot(&state.prev_grad, &state.prev_grad);
        let pr: f64 = grad
            .iter()
            .zip(&state.prev_grad)
            .map(|(g, gp)| g * (g - gp))
            .sum::<f64>()
            / gg_prev;
        let beta = if pr.is_finite() { pr.max(0.0) } else { 0.0 };
        if beta > 0.0 {
            let cand: Vec<f64> = dir
                .iter()
                .zip(&state.prev_dir)
                .map(|(d, p)| d + beta * p)
                .collect();
            if dot(&cand, grad) < 0.0 {
                dir = cand;
                restarted = false;
            }
        } else {
            restarted = false;
        }
    }
    let d_inf = dir.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    dir.iter_mut().for_each(|d| *d /= d_inf);
    let slope = dot(grad, &dir);

    state.since_restart = if restarted {
        1
    } else {
        state.since_restart + 1
    };
    state.prev_grad.clear();
    state.prev_grad.extend_from_slice(grad);

    let mut trial = vec![0.0; x.len()];
    let mut alpha = bounds.alpha_max;
    let mut probes = 0;
    let (f_probe, sufficient) = loop {
        let floor = alpha < bounds.alpha_min;
        if floor {
            alpha = bounds.alpha_min;
        }
        for ((t, xi), di) in trial.iter_mut().zip(x.iter()).zip(&dir) {
            *t = xi + alpha * di;
        }
        project(&mut trial);
        let f = probe(&trial)?;
        probes += 1;
        let ok = f <= f0 + ARMIJO_C1 * alpha * slope;
        if ok || floor {
            break (f, ok);
        }
        alpha *= 0.5;
    };
    x.copy_from_slice(&trial);
    state.prev_dir = dir;
    Ok(StepOutcome {
        alpha,
        f_probe,
        probes,
        restarted,
        sufficient_decrease: sufficient,
    })
}
