//! Exact half-perimeter wirelength and its weighted-average smoothing.

use crate::error::{PlaceError, Result};
use crate::model::{Netlist, PlacementState};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WirelengthResult {
    pub total: f64,
    pub per_net: Option<Vec<f64>>,
    /// Gradient with respect to the placement centers, `(d/dx, d/dy)`.
    /// Entries for fixed nodes are not represented; fillers stay zero.
    pub gradient: Option<(Vec<f64>, Vec<f64>)>,
}

fn check_finite(placement: &PlacementState) -> Result<()> {
    if placement.is_finite() {
        Ok(())
    } else {
        Err(PlaceError::NonFinite("placement coordinates".into()))
    }
}

/// Sum over nets of the bounding-box half perimeter of the net's pins.
pub fn hpwl(netlist: &Netlist, placement: &PlacementState) -> Result<WirelengthResult> {
    check_finite(placement)?;
    let per_net: Vec<f64> = netlist
        .nets
        .iter()
        .map(|net| net_hpwl(netlist, placement, net.pins.clone()))
        .collect();
    Ok(WirelengthResult {
        total: per_net.iter().sum(),
        per_net: Some(per_net),
        gradient: None,
    })
}

/// HPWL of the pins in `range`.
pub fn net_hpwl(
    netlist: &Netlist,
    placement: &PlacementState,
    range: std::ops::Range<usize>,
) -> f64 {
    if range.len() < 2 {
        return 0.0;
    }
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for pin in &netlist.pins[range] {
        let (x, y) = netlist.pin_position(pin, placement);
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    (x_hi - x_lo) + (y_hi - y_lo)
}

/// One axis of the weighted-average model for one net. Writes the partial
/// derivative for each pin into `grad` and returns the smoothed extent.
///
/// Exponentials are shifted by the net's own max (resp. min) so that no
/// weight exceeds one.
fn wa_axis(coords: &[f64], gamma: f64, grad: &mut [f64]) -> f64 {
    let max = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut s_pos, mut t_pos, mut s_neg, mut t_neg) = (0.0, 0.0, 0.0, 0.0);
    for &c in coords {
        let a = ((c - max) / gamma).exp();
        let b = ((min - c) / gamma).exp();
        s_pos += a;
        t_pos += c * a;
        s_neg += b;
        t_neg += c * b;
    }
    let hi = t_pos / s_pos;
    let lo = t_neg / s_neg;
    for (g, &c) in grad.iter_mut().zip(coords) {
        let a = ((c - max) / gamma).exp();
        let b = ((min - c) / gamma).exp();
        let d_hi = a / s_pos * (1.0 + (c - hi) / gamma);
        let d_lo = b / s_neg * (1.0 - (c - lo) / gamma);
        *g = d_hi - d_lo;
    }
    hi - lo
}

/// Weighted-average wirelength with smoothing `gamma` and its gradient.
pub fn wa_wirelength(
    netlist: &Netlist,
    placement: &PlacementState,
    gamma: f64,
) -> Result<WirelengthResult> {
    let (total, per_net, gx, gy) = wa_eval(netlist, placement, gamma, true)?;
    Ok(WirelengthResult {
        total,
        per_net: Some(per_net),
        gradient: Some((gx, gy)),
    })
}

/// Smoothed total only; used by line-search probes.
pub fn wa_total(netlist: &Netlist, placement: &PlacementState, gamma: f64) -> Result<f64> {
    wa_eval(netlist, placement, gamma, false).map(|r| r.0)
}

type WaParts = (f64, Vec<f64>, Vec<f64>, Vec<f64>);

fn wa_eval(
    netlist: &Netlist,
    placement: &PlacementState,
    gamma: f64,
    with_gradient: bool,
) -> Result<WaParts> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(PlaceError::InvalidArgument(format!(
            "smoothing parameter must be positive, got {gamma}"
        )));
    }
    check_finite(placement)?;
    let m = netlist.num_movable();
    let (mut gx, mut gy) = if with_gradient {
        (vec![0.0; placement.len()], vec![0.0; placement.len()])
    } else {
        (Vec::new(), Vec::new())
    };
    let mut per_net = Vec::with_capacity(if with_gradient { netlist.nets.len() } else { 0 });
    let mut total = 0.0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dx = Vec::new();
    let mut dy = Vec::new();
    for net in &netlist.nets {
        let pins = netlist.net_pins(net);
        if pins.len() < 2 {
            if with_gradient {
                per_net.push(0.0);
            }
            continue;
        }
        xs.clear();
        ys.clear();
        for pin in pins {
            let (x, y) = netlist.pin_position(pin, placement);
            xs.push(x);
            ys.push(y);
        }
        dx.resize(pins.len(), 0.0);
        dy.resize(pins.len(), 0.0);
        let w = wa_axis(&xs, gamma, &mut dx) + wa_axis(&ys, gamma, &mut dy);
        total += w;
        if with_gradient {
            per_net.push(w);
            for (k, pin) in pins.iter().enumerate() {
                if pin.node < m {
                    gx[pin.node] += dx[k];
                    gy[pin.node] += dy[k];
                }
            }
        }
    }
    Ok((total, per_net, gx, gy))
}
