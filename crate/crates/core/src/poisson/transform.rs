//! Real cosine and sine transforms on the half-sample grid, built on a
//! length-`n` complex FFT (Makhoul's reordering).
//!
//! With `theta(k, i) = pi * k * (2i + 1) / (2n)`:
//!
//! * [`Transform1d::dct2`]: `X[k] = sum_i x[i] cos(theta(k, i))`
//! * [`Transform1d::cos_synth`]: `y[i] = sum_k c[k] cos(theta(k, i))`
//! * [`Transform1d::sin_synth`]: `y[i] = sum_k s[k] sin(theta(k, i))`

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

pub struct Transform1d {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `exp(-i pi k / 2n)`
    twiddle: Vec<Complex<f64>>,
}

impl Transform1d {
    pub fn new(n: usize) -> Self {
        assert!(
            n.is_power_of_two(),
            "transform length must be a power of two"
        );
        let mut planner = FftPlanner::new();
        let twiddle = (0..n)
            .map(|k| Complex::from_polar(1.0, -std::f64::consts::PI * k as f64 / (2 * n) as f64))
            .collect();
        Transform1d {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            twiddle,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dct2(&self, input: &[f64], out: &mut [f64], buf: &mut Vec<Complex<f64>>) {
        let n = self.n;
        if n == 1 {
            out[0] = input[0];
            return;
        }
        buf.clear();
        buf.resize(n, Complex::default());
        for i in 0..n / 2 {
            buf[i] = Complex::new(input[2 * i], 0.0);
            buf[n - 1 - i] = Complex::new(input[2 * i + 1], 0.0);
        }
        self.forward.process(buf);
        for k in 0..n {
            out[k] = (buf[k] * self.twiddle[k]).re;
        }
    }

    /// Inverse of [`Self::dct2`].
    fn idct2(&self, coeffs: &[f64], out: &mut [f64], buf: &mut Vec<Complex<f64>>) {
        let n = self.n;
        if n == 1 {
            out[0] = coeffs[0];
            return;
        }
        buf.clear();
        buf.resize(n, Complex::default());
        for k in 0..n {
            let mirror = if k == 0 { 0.0 } else { coeffs[n - k] };
            buf[k] = Complex::new(coeffs[k], -mirror) * self.twiddle[k].conj();
        }
        self.inverse.process(buf);
        let scale = 1.0 / n as f64;
        for i in 0..n / 2 {
            out[2 * i] = buf[i].re * scale;
            out[2 * i + 1] = buf[n - 1 - i].re * scale;
        }
    }

    pub fn cos_synth(&self, coeffs: &[f64], out: &mut [f64], scratch: &mut Scratch) {
        let n = self.n;
        let half = 0.5 * n as f64;
        let tmp = &mut scratch.weighted;
        tmp.clear();
        tmp.extend(coeffs.iter().enumerate().map(
            |(k, &c)| {
                if k == 0 {
                    c * n as f64
                } else {
                    c * half
                }
            },
        ));
        self.idct2(tmp, out, &mut scratch.buf);
    }

    /// Uses `sin(theta(k, i)) = (-1)^i cos(theta(n - k, i))`.
    pub fn sin_synth(&self, coeffs: &[f64], out: &mut [f64], scratch: &mut Scratch) {
        let n = self.n;
        let mut flipped = std::mem::take(&mut scratch.flipped);
        flipped.clear();
        flipped.resize(n, 0.0);
        for k in 1..n {
            flipped[n - k] = coeffs[k];
        }
        self.cos_synth(&flipped, out, scratch);
        scratch.flipped = flipped;
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
}

/// Reusable work buffers for [`Transform1d`].
#[derive(Default)]
pub struct Scratch {
    pub buf: Vec<Complex<f64>>,
    weighted: Vec<f64>,
    flipped: Vec<f64>,
}
