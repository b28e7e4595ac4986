//! SVG heatmaps of grid quantities, line charts of the iteration trace, and
//! plain-text matrix dumps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;

use crate::engine::{IterationTrace, Snapshot};
use crate::error::{PlaceError, Result};

const CELL_PX: f64 = 8.0;
const MAX_PX: f64 = 640.0;

/// Piecewise-linear approximation of the viridis palette, `t` in [0, 1].
fn color(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.5
    };
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Heatmap of an `n x n` row-major grid (row 0 at the bottom).
pub fn heatmap_svg(values: &[f64], n: usize, title: &str) -> String {
    let px = (MAX_PX / n.max(1) as f64).clamp(1.0, CELL_PX * 4.0);
    let side = px * n as f64;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let flat = span.is_nan() || span <= 1e-12 * hi.abs().max(lo.abs()).max(1e-300);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = side,
        h = side + 24.0
    );
    let _ = writeln!(
        s,
        r#"<text x="4" y="16" font-family="sans-serif" font-size="13">{title} [{lo:.3e}, {hi:.3e}]</text>"#
    );
    for iy in 0..n {
        for ix in 0..n {
            let v = values[iy * n + ix];
            let t = if flat { 0.5 } else { (v - lo) / span };
            let (r, g, b) = color(t);
            let y = 24.0 + (n - 1 - iy) as f64 * px;
            let _ = writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                ix as f64 * px,
                y,
                px,
                px
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Line chart with one curve per series; each curve is scaled to its own
/// range and labelled with it.
pub fn line_chart_svg(title: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let x_lo = series
        .iter()
        .flat_map(|s| s.1.iter().map(|p| p.0))
        .fold(f64::INFINITY, f64::min);
    let x_hi = series
        .iter()
        .flat_map(|s| s.1.iter().map(|p| p.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="14">{title}</text>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for (k, (name, pts)) in series.iter().enumerate() {
        let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let c = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let px = PAD + (x - x_lo) / x_span * (W - 2.0 * PAD);
                let py = H - PAD - (y - lo) / span * (H - 2.0 * PAD);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{c}">{name} [{lo:.3e}, {hi:.3e}]</text>"#,
            PAD + 8.0,
            PAD + 16.0 * (k + 1) as f64
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">iteration {x_lo} .. {x_hi}</text>"#,
        PAD,
        H - 12.0
    );
    s.push_str("</svg>\n");
    s
}

fn write(path: PathBuf, text: &str, out: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).map_err(|e| PlaceError::io(&path, e))?;
    out.push(path);
    Ok(())
}

/// Writes `tau_energy.svg`, `wirelength.svg` and, per snapshot,
/// `density_kK.svg`, `potential_kK.svg` and `field_kK.svg`. Returns the
/// files written; an empty trace writes nothing.
pub fn emit_figures(
    trace: &[IterationTrace],
    snapshots: &[Snapshot],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    if trace.is_empty() {
        warn!("empty trace, no figures written");
        return Ok(out);
    }
    fs::create_dir_all(dir).map_err(|e| PlaceError::io(dir, e))?;
    let pts = |f: fn(&IterationTrace) -> f64| -> Vec<(f64, f64)> {
        trace.iter().map(|t| (t.k as f64, f(t))).collect()
    };
    write(
        dir.join("tau_energy.svg"),
        &line_chart_svg(
            "overflow and potential energy",
            &[("tau", pts(|t| t.tau)), ("N", pts(|t| t.energy))],
        ),
        &mut out,
    )?;
    write(
        dir.join("wirelength.svg"),
        &line_chart_svg(
            "HPWL and smoothed wirelength",
            &[("W", pts(|t| t.hpwl)), ("W~", pts(|t| t.wa))],
        ),
        &mut out,
    )?;
    for snap in snapshots {
        let n = snap.density.geom.n;
        let k = snap.k;
        let mag: Vec<f64> = snap
            .field
            .ex
            .iter()
            .zip(&snap.field.ey)
            .map(|(x, y)| x.hypot(*y))
            .collect();
        write(
            dir.join(format!("density_k{k}.svg")),
            &heatmap_svg(&snap.density.rho, n, &format!("density, k = {k}")),
            &mut out,
        )?;
        write(
            dir.join(format!("potential_k{k}.svg")),
            &heatmap_svg(&snap.field.psi, n, &format!("potential, k = {k}")),
            &mut out,
        )?;
        write(
            dir.join(format!("field_k{k}.svg")),
            &heatmap_svg(&mag, n, &format!("|E|, k = {k}")),
            &mut out,
        )?;
    }
    Ok(out)
}

/// Plain-text dump, one grid row per line, top row first.
pub fn matrix_text(values: &[f64], n: usize) -> String {
    let mut s = String::new();
    for iy in (0..n).rev() {
        let row: Vec<String> = values[iy * n..(iy + 1) * n]
            .iter()
            .map(|v| format!("{v:.6e}"))
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_is_one_color() {
        let svg = heatmap_svg(&[0.25; 16], 4, "flat");
        let fills: std::collections::BTreeSet<&str> = svg
            .match_indices("fill=\"#")
            .map(|(i, _)| &svg[i + 6..i + 13])
            .collect();
        assert_eq!(fills.len(), 1);
    }

    #[test]
    fn empty_trace_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_figures(&[], &[], dir.path()).unwrap();
        assert!(files.is_empty());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn matrix_dump_shape() {
        let t = matrix_text(&[1.0, 2.0, 3.0, 4.0], 2);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("3.0"));
    }

    #[test]
    fn palette_endpoints() {
        assert_eq!(color(0.0), (68, 1, 84));
        assert_eq!(color(1.0), (253, 231, 37));
    }
}
