//! Spectral solution of the Neumann Poisson problem on the bin grid.
//!
//! The density is expanded in the cosine basis `cos(w_u x) cos(w_v y)`,
//! `w_u = pi u / n`, sampled at bin centers (`x = ix + 1/2` in bin units).
//! The basis is even about both grid edges, so its derivatives vanish there
//! and the Neumann condition holds mode by mode. Dividing each coefficient
//! by `w_u^2 + w_v^2` inverts the Laplacian; dropping the `(0, 0)` mode pins
//! the potential to zero mean. The field `E = -grad psi` picks up a sine
//! factor along the differentiated axis.
//!
//! All quantities are in bin units; [`FieldMaps::sample`] returns raw bin
//! units and callers divide by the bin size.

mod transform;

pub use transform::{Scratch, Transform1d};

use std::f64::consts::PI;

use crate::density::DensityGrid;
use crate::error::{PlaceError, Result};
use crate::grid::GridGeometry;
use crate::model::Rect;

/// Cosine coefficients of the density.
///
/// `a[v * n + u] = 1/(2n) * sum_{x,y} rho(x, y) cos(w_u x) cos(w_v y)`.
/// Reconstructing the density from these needs the weight returned by
/// [`SpectralCoeffs::synthesis_weight`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn frequency(&self, k: usize) -> f64 {
        PI * k as f64 / self.n as f64
    }

    /// Factor that turns `a[u, v]` into the amplitude of its basis function:
    /// `2 c_u c_v / n` with `c_0 = 1`, `c_k = 2` otherwise.
    pub fn synthesis_weight(&self, u: usize, v: usize) -> f64 {
        let c = |k: usize| if k == 0 { 1.0 } else { 2.0 };
        2.0 * c(u) * c(v) / self.n as f64
    }

    /// Amplitude of mode `(u, v)`.
    pub fn amplitude(&self, u: usize, v: usize) -> f64 {
        self.a[v * self.n + u] * self.synthesis_weight(u, v)
    }
}

/// Potential and field on the bin grid, in bin units.
#[derive(Debug, Clone)]
pub struct FieldMaps {
    pub geom: GridGeometry,
    pub psi: Vec<f64>,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    pub coeffs: SpectralCoeffs,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSample {
    pub psi: f64,
    pub ex: f64,
    pub ey: f64,
}

impl FieldMaps {
    pub fn n(&self) -> usize {
        self.geom.n
    }

    /// Overlap-area-weighted averages of the bin values under `rect`.
    pub fn sample(&self, rect: &Rect) -> Result<FieldSample> {
        let mut acc = FieldSample::default();
        let mut weight = 0.0;
        self.geom.visit_overlaps(rect, |b, w| {
            acc.psi += w * self.psi[b];
            acc.ex += w * self.ex[b];
            acc.ey += w * self.ey[b];
            weight += w;
        });
        if weight <= 0.0 {
            return Err(PlaceError::InvalidArgument(
                "sampled rectangle lies outside the grid".into(),
            ));
        }
        Ok(FieldSample {
            psi: acc.psi / weight,
            ex: acc.ex / weight,
            ey: acc.ey / weight,
        })
    }

    /// Evaluates the series at an arbitrary point given in bin units
    /// (`0 <= x, y <= n`). O(n^2); meant for checks and plots, not the
    /// optimizer.
    pub fn evaluate(&self, x: f64, y: f64) -> FieldSample {
        let c = &self.coeffs;
        let n = c.n;
        let mut out = FieldSample::default();
        for v in 0..n {
            let wv = c.frequency(v);
            let (sy, cy) = (wv * y).sin_cos();
            for u in 0..n {
                if u == 0 && v == 0 {
                    continue;
                }
                let wu = c.frequency(u);
                let (sx, cx) = (wu * x).sin_cos();
                let amp = c.amplitude(u, v) / (wu * wu + wv * wv);
                out.psi += amp * cx * cy;
                out.ex += amp * wu * sx * cy;
                out.ey += amp * wv * cx * sy;
            }
        }
        out
    }
}

/// Fast solver for a fixed grid size; keeps FFT plans between solves.
pub struct SpectralSolver {
    n: usize,
    transform: Transform1d,
}

impl SpectralSolver {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(PlaceError::InvalidArgument(format!(
                "grid dimension {n} is not a power of two"
            )));
        }
        Ok(SpectralSolver {
            n,
            transform: Transform1d::new(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rho: &DensityGrid) -> Result<FieldMaps> {
        let n = self.n;
        if rho.geom.n != n {
            return Err(PlaceError::InvalidArgument(format!(
                "solver built for n = {n}, grid has n = {}",
                rho.geom.n
            )));
        }
        if rho.rho.iter().any(|v| !v.is_finite()) {
            return Err(PlaceError::NonFinite("density".into()));
        }
        let mut scratch = Scratch::default();
        let mut line = vec![0.0; n];
        let mut out = vec![0.0; n];

        // Analysis: DCT-II along x, then along y.
        let mut a = rho.rho.clone();
        for row in a.chunks_exact_mut(n) {
            self.transform.dct2(row, &mut out, &mut scratch.buf);
            row.copy_from_slice(&out);
        }
        for u in 0..n {
            for v in 0..n {
                line[v] = a[v * n + u];
            }
            self.transform.dct2(&line, &mut out, &mut scratch.buf);
            for v in 0..n {
                a[v * n + u] = out[v];
            }
        }
        let norm = 1.0 / (2 * n) as f64;
        a.iter_mut().for_each(|c| *c *= norm);
        let coeffs = SpectralCoeffs { n, a };

        let mut psi = vec![0.0; n * n];
        let mut ex = vec![0.0; n * n];
        let mut ey = vec![0.0; n * n];
        for v in 0..n {
            let wv = coeffs.frequency(v);
            for u in 0..n {
                if u == 0 && v == 0 {
                    continue;
                }
                let wu = coeffs.frequency(u);
                let p = coeffs.amplitude(u, v) / (wu * wu + wv * wv);
                psi[v * n + u] = p;
                ex[v * n + u] = p * wu;
                ey[v * n + u] = p * wv;
            }
        }

        #[derive(Clone, Copy)]
        enum Kind {
            Cos,
            Sin,
        }
        let synth = |data: &mut [f64], along_x: Kind, along_y: Kind, sc: &mut Scratch| {
            let mut line = vec![0.0; n];
            let mut out = vec![0.0; n];
            for row in data.chunks_exact_mut(n) {
                match along_x {
                    Kind::Cos => self.transform.cos_synth(row, &mut out, sc),
                    Kind::Sin => self.transform.sin_synth(row, &mut out, sc),
                }
                row.copy_from_slice(&out);
            }
            for ix in 0..n {
                for iy in 0..n {
                    line[iy] = data[iy * n + ix];
                }
                match along_y {
                    Kind::Cos => self.transform.cos_synth(&line, &mut out, sc),
                    Kind::Sin => self.transform.sin_synth(&line, &mut out, sc),
                }
                for iy in 0..n {
                    data[iy * n + ix] = out[iy];
                }
            }
        };
        synth(&mut psi, Kind::Cos, Kind::Cos, &mut scratch);
        synth(&mut ex, Kind::Sin, Kind::Cos, &mut scratch);
        synth(&mut ey, Kind::Cos, Kind::Sin, &mut scratch);

        Ok(FieldMaps {
            geom: rho.geom,
            psi,
            ex,
            ey,
            coeffs,
        })
    }
}

/// One-shot solve; builds a [`SpectralSolver`] for the grid's size.
pub fn solve(rho: &DensityGrid) -> Result<FieldMaps> {
    SpectralSolver::new(rho.geom.n)?.solve(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Rect;

    fn grid(n: usize, f: impl Fn(usize, usize) -> f64) -> DensityGrid {
        let geom = GridGeometry::covering(&Rect::new(0.0, 0.0, n as f64, n as f64), n);
        let rho = (0..n * n).map(|b| f(b % n, b / n)).collect();
        DensityGrid {
            geom,
            rho,
            dc_removed: true,
        }
    }

    #[test]
    fn zero_density_gives_zero_field() {
        let f = solve(&grid(8, |_, _| 0.0)).unwrap();
        assert!(f.psi.iter().chain(&f.ex).chain(&f.ey).all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SpectralSolver::new(6).is_err());
        assert!(SpectralSolver::new(0).is_err());
        let mut g = grid(4, |_, _| 0.0);
        g.rho[3] = f64::NAN;
        assert!(matches!(solve(&g), Err(PlaceError::NonFinite(_))));
    }

    #[test]
    fn single_cosine_mode() {
        let n = 4;
        let w = PI / 4.0;
        let f = solve(&grid(n, |ix, _| (w * (ix as f64 + 0.5)).cos())).unwrap();
        for b in 0..n * n {
            let x = (b % n) as f64 + 0.5;
            assert!((f.psi[b] - 16.0 / (PI * PI) * (w * x).cos()).abs() < 1e-10);
            assert!((f.ex[b] - 4.0 / PI * (w * x).sin()).abs() < 1e-10);
            assert!(f.ey[b].abs() < 1e-10);
        }
    }

    #[test]
    fn field_vanishes_on_the_boundary() {
        let n = 8;
        let f = solve(&grid(n, |ix, iy| ((ix * 3 + iy * 5) % 7) as f64 - 3.0)).unwrap();
        for t in [0.3, 2.0, 5.5, 7.9] {
            assert!(f.evaluate(0.0, t).ex.abs() < 1e-10);
            assert!(f.evaluate(n as f64, t).ex.abs() < 1e-10);
            assert!(f.evaluate(t, 0.0).ey.abs() < 1e-10);
            assert!(f.evaluate(t, n as f64).ey.abs() < 1e-10);
        }
    }

    #[test]
    fn series_agrees_with_grid_at_bin_centers() {
        let n = 8;
        let f = solve(&grid(n, |ix, iy| ((ix * ix + 3 * iy) % 5) as f64)).unwrap();
        for b in [0, 9, 27, 63] {
            let s = f.evaluate((b % n) as f64 + 0.5, (b / n) as f64 + 0.5);
            assert!((s.psi - f.psi[b]).abs() < 1e-10);
            assert!((s.ex - f.ex[b]).abs() < 1e-10);
            assert!((s.ey - f.ey[b]).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_averages_bins() {
        let f = solve(&grid(4, |ix, iy| (ix + 2 * iy) as f64)).unwrap();
        let one = f.sample(&Rect::new(1.0, 2.0, 2.0, 3.0)).unwrap();
        assert_eq!(one.psi, f.psi[2 * 4 + 1]);
        let two = f.sample(&Rect::new(1.0, 2.0, 3.0, 3.0)).unwrap();
        assert!((two.ex - 0.5 * (f.ex[9] + f.ex[10])).abs() < 1e-12);
        assert!(f.sample(&Rect::new(10.0, 10.0, 11.0, 11.0)).is_err());
    }
}
