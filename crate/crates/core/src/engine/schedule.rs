//! Self-adaptive parameter schedules for the global placement loop.

use serde::Serialize;

pub const DELTA_W_REF: f64 = 3.5e5;
pub const MU_BOUNDS: (f64, f64) = (0.75, 1.1);
/// `alpha_max_0 = ALPHA_MAX0_BINS * w_b`.
pub const ALPHA_MAX0_BINS: f64 = 0.044;
pub const ALPHA_MIN_RATIO: f64 = 0.01;

/// Penalty growth factor `1.1^(1 - dw / dw_ref)`, clamped to `MU_BOUNDS`.
pub fn penalty_factor(delta_w: f64, delta_w_ref: f64) -> f64 {
    1.1f64
        .powf(1.0 - delta_w / delta_w_ref)
        .clamp(MU_BOUNDS.0, MU_BOUNDS.1)
}

/// Smoothing parameter `8 w_b * 10^(20/9 (tau - 0.1) - 1)`.
pub fn smoothing_for(tau: f64, w_b: f64) -> f64 {
    8.0 * w_b * 10f64.powf(20.0 / 9.0 * (tau - 0.1) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleState {
    pub lambda: f64,
    pub alpha_max: f64,
    pub alpha_min: f64,
    pub gamma: f64,
    pub tau: f64,
    pub k: usize,
    pub delta_w_ref: f64,
    pub mu_bounds: (f64, f64),
    /// Bin width the step and smoothing schedules are expressed in.
    pub w_b: f64,
    pub mu: f64,
}

impl ScheduleState {
    pub fn initial(lambda: f64, tau: f64, w_b: f64, delta_w_ref: f64) -> Self {
        let alpha_max = ALPHA_MAX0_BINS * w_b;
        ScheduleState {
            lambda,
            alpha_max,
            alpha_min: ALPHA_MIN_RATIO * alpha_max,
            gamma: smoothing_for(tau, w_b),
            tau,
            k: 0,
            delta_w_ref,
            mu_bounds: MU_BOUNDS,
            w_b,
            mu: 1.0,
        }
    }

    pub fn alpha_max0(&self) -> f64 {
        ALPHA_MAX0_BINS * self.w_b
    }
}

/// Advances every schedule after iteration `k` accepted step `alpha_k` and
/// reached HPWL `w_k` and overflow `tau_k`.
pub fn update_schedules(
    s: &ScheduleState,
    w_k: f64,
    w_prev: f64,
    tau_k: f64,
    alpha_k: f64,
) -> ScheduleState {
    let alpha_max = s.alpha_max0().max(2.0 * alpha_k);
    let mu = penalty_factor(w_k - w_prev, s.delta_w_ref);
    ScheduleState {
        lambda: mu * s.lambda,
        alpha_max,
        alpha_min: ALPHA_MIN_RATIO * alpha_max,
        gamma: smoothing_for(tau_k, s.w_b),
        tau: tau_k,
        k: s.k + 1,
        delta_w_ref: s.delta_w_ref,
        mu_bounds: s.mu_bounds,
        w_b: s.w_b,
        mu,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_points() {
        assert_eq!(penalty_factor(DELTA_W_REF, DELTA_W_REF), 1.0);
        assert_eq!(penalty_factor(0.0, DELTA_W_REF), 1.1);
        assert!((smoothing_for(0.1, 3.0) - 0.8 * 3.0).abs() < 1e-12);
        assert!((smoothing_for(1.0, 3.0) - 80.0 * 3.0).abs() < 1e-9);
    }

    #[test]
    fn mu_is_clamped_below() {
        assert_eq!(penalty_factor(1e9, DELTA_W_REF), 0.75);
        assert_eq!(penalty_factor(-1e9, DELTA_W_REF), 1.1);
    }

    #[test]
    fn step_bounds_follow_accepted_step() {
        let s = ScheduleState::initial(1.0, 0.5, 10.0, DELTA_W_REF);
        assert!((s.alpha_max - 0.44).abs() < 1e-12);
        let t = update_schedules(&s, 100.0, 100.0, 0.5, 3.0);
        assert_eq!(t.alpha_max, 6.0);
        assert!((t.alpha_min - 0.06).abs() < 1e-12);
        let u = update_schedules(&t, 100.0, 100.0, 0.5, 0.01);
        assert!((u.alpha_max - 0.44).abs() < 1e-12);
        assert_eq!(u.k, 2);
        assert!((u.lambda - 1.1f64.powi(2)).abs() < 1e-12);
    }
}
