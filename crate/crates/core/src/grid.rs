//! Uniform bin grid over the placement region.

use serde::{Deserialize, Serialize};

use crate::model::Rect;

/// Geometry of an `n x n` bin grid. Bin `(ix, iy)` is stored at
/// `iy * n + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub n: usize,
    pub x_lo: f64,
    pub y_lo: f64,
    pub w_b: f64,
    pub h_b: f64,
}

impl GridGeometry {
    pub fn covering(bbox: &Rect, n: usize) -> Self {
        GridGeometry {
            n,
            x_lo: bbox.x_lo,
            y_lo: bbox.y_lo,
            w_b: bbox.width() / n as f64,
            h_b: bbox.height() / n as f64,
        }
    }

    pub fn bin_area(&self) -> f64 {
        self.w_b * self.h_b
    }

    pub fn num_bins(&self) -> usize {
        self.n * self.n
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(
            self.x_lo,
            self.y_lo,
            self.x_lo + self.w_b * self.n as f64,
            self.y_lo + self.h_b * self.n as f64,
        )
    }

    pub fn bin_rect(&self, bin: usize) -> Rect {
        let (ix, iy) = (bin % self.n, bin / self.n);
        Rect::new(
            self.x_lo + ix as f64 * self.w_b,
            self.y_lo + iy as f64 * self.h_b,
            self.x_lo + (ix + 1) as f64 * self.w_b,
            self.y_lo + (iy + 1) as f64 * self.h_b,
        )
    }

    /// Calls `f(bin, overlap)` for every bin the rectangle intersects, where
    /// `overlap` is the intersection area in units of one bin area. Parts
    /// outside the grid are dropped.
    #[inline]
    pub fn visit_overlaps(&self, rect: &Rect, mut f: impl FnMut(usize, f64)) {
        let n = self.n as f64;
        let fx0 = ((rect.x_lo - self.x_lo) / self.w_b).max(0.0);
        let fx1 = ((rect.x_hi - self.x_lo) / self.w_b).min(n);
        let fy0 = ((rect.y_lo - self.y_lo) / self.h_b).max(0.0);
        let fy1 = ((rect.y_hi - self.y_lo) / self.h_b).min(n);
        if !(fx1 > fx0 && fy1 > fy0) {
            return;
        }
        let ix0 = fx0.floor() as usize;
        let ix1 = (fx1.ceil() as usize).min(self.n);
        let iy0 = fy0.floor() as usize;
        let iy1 = (fy1.ceil() as usize).min(self.n);
        for iy in iy0..iy1 {
            let oy = fy1.min((iy + 1) as f64) - fy0.max(iy as f64);
            if oy <= 0.0 {
                continue;
            }
            for ix in ix0..ix1 {
                let ox = fx1.min((ix + 1) as f64) - fx0.max(ix as f64);
                if ox > 0.0 {
                    f(iy * self.n + ix, ox * oy);
                }
            }
        }
    }
}
