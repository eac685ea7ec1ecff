//! 3-D FFT on the periodic grid and the Fourier-multiplier operators built
//! on it.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{GridSpec, ScalarField, VectorField};
use crate::par::Execution;

pub type C64 = Complex<f64>;

/// Spectral differentiation on a [`GridSpec`].
///
/// Derivative wavenumbers are `2πm/L` with the Nyquist entry set to zero, so
/// `div∘curl` and `curl∘grad` vanish identically and the discrete Laplacian
/// used by the Poisson solver equals `div∘grad`.
#[derive(Clone)]
pub struct Spectral {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    keep: Vec<bool>,
    dealias: bool,
    exec: Execution,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("grid", &self.grid)
            .field("dealias", &self.dealias)
            .field("exec", &self.exec)
            .finish()
    }
}

impl Spectral {
    pub fn new(grid: GridSpec) -> Self {
        Self::with_execution(grid, Execution::default())
    }

    pub fn with_execution(grid: GridSpec, exec: Execution) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let base = 2.0 * std::f64::consts::PI / grid.box_length();
        let signed = |m: usize| -> i64 {
            if m <= n / 2 {
                m as i64
            } else {
                m as i64 - n as i64
            }
        };
        let k = (0..n)
            .map(|m| if m == n / 2 { 0.0 } else { base * signed(m) as f64 })
            .collect();
        let keep = (0..n).map(|m| 3 * signed(m).unsigned_abs() as usize <= n).collect();
        Spectral {
            grid,
            forward,
            inverse,
            k,
            keep,
            dealias: false,
            exec,
        }
    }

    /// Enables the 2/3-rule mask on every derivative output.
    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// Derivative wavevector of the mode stored at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let (i, j, l) = self.grid.unflatten(idx);
        [self.k[i], self.k[j], self.k[l]]
    }

    #[inline]
    fn kept(&self, idx: usize) -> bool {
        if !self.dealias {
            return true;
        }
        let (i, j, l) = self.grid.unflatten(idx);
        self.keep[i] && self.keep[j] && self.keep[l]
    }

    fn fft_rows(&self, buf: &mut [C64], inverse: bool) {
        let n = self.grid.n();
        let plan = if inverse { &self.inverse } else { &self.forward };
        self.exec.for_each_chunk(buf, n * n, |_, slab| plan.process(slab));
    }

    /// Swaps the x and y axes (involution).
    fn transpose_xy(&self, src: &[C64], dst: &mut [C64]) {
        let n = self.grid.n();
        self.exec.for_each_chunk(dst, n * n, |z, slab| {
            let s = &src[z * n * n..(z + 1) * n * n];
            for a in 0..n {
                for b in 0..n {
                    slab[a * n + b] = s[b * n + a];
                }
            }
        });
    }

    /// Swaps the x and z axes (involution).
    fn transpose_xz(&self, src: &[C64], dst: &mut [C64]) {
        let n = self.grid.n();
        self.exec.for_each_chunk(dst, n * n, |a, slab| {
            for y in 0..n {
                for b in 0..n {
                    slab[y * n + b] = src[(b * n + y) * n + a];
                }
            }
        });
    }

    fn fft3(&self, buf: &mut Vec<C64>, inverse: bool) {
        let mut tmp = vec![C64::new(0.0, 0.0); buf.len()];
        self.fft_rows(buf, inverse);
        self.transpose_xy(buf, &mut tmp);
        self.fft_rows(&mut tmp, inverse);
        self.transpose_xy(&tmp, buf);
        self.transpose_xz(buf, &mut tmp);
        self.fft_rows(&mut tmp, inverse);
        self.transpose_xz(&tmp, buf);
    }

    /// Unnormalized forward transform of a real field.
    pub fn forward(&self, f: &[f64]) -> Vec<C64> {
        let mut buf: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.fft3(&mut buf, false);
        buf
    }

    /// Inverse transform (normalized), keeping the real part.
    pub fn inverse(&self, mut spec: Vec<C64>) -> ScalarField {
        self.fft3(&mut spec, true);
        let scale = 1.0 / spec.len() as f64;
        spec.into_iter().map(|c| c.re * scale).collect()
    }

    fn forward3(&self, f: &VectorField) -> [Vec<C64>; 3] {
        [self.forward(&f.0[0]), self.forward(&f.0[1]), self.forward(&f.0[2])]
    }

    fn inverse3(&self, s: [Vec<C64>; 3]) -> VectorField {
        let [a, b, c] = s;
        VectorField([self.inverse(a), self.inverse(b), self.inverse(c)])
    }

    /// Applies `op(k, values)` to every mode of a 3-component spectrum.
    fn map_modes3(&self, src: &[Vec<C64>; 3], op: impl Fn([f64; 3], [C64; 3]) -> [C64; 3] + Sync + Send) -> [Vec<C64>; 3] {
        let zero = C64::new(0.0, 0.0);
        let mut tri = vec![[zero; 3]; self.grid.len()];
        let n2 = self.grid.n() * self.grid.n();
        self.exec.for_each_chunk(&mut tri, n2, |z, slab| {
            for (off, v) in slab.iter_mut().enumerate() {
                let idx = z * n2 + off;
                if self.kept(idx) {
                    *v = op(self.wavevector(idx), [src[0][idx], src[1][idx], src[2][idx]]);
                }
            }
        });
        std::array::from_fn(|c| tri.iter().map(|t| t[c]).collect())
    }

    fn map_modes(&self, src: &[C64], op: impl Fn([f64; 3], C64) -> C64 + Sync + Send) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); src.len()];
        let n2 = self.grid.n() * self.grid.n();
        self.exec.for_each_chunk(&mut out, n2, |z, slab| {
            for (off, v) in slab.iter_mut().enumerate() {
                let idx = z * n2 + off;
                if self.kept(idx) {
                    *v = op(self.wavevector(idx), src[idx]);
                }
            }
        });
        out
    }

    /// `∇∧F` via the multiplier `i k ∧`.
    pub fn curl(&self, f: &VectorField) -> VectorField {
        let s = self.forward3(f);
        self.inverse3(self.map_modes3(&s, |k, v| curl_mode(k, v)))
    }

    /// `∇·F` via `i k ·`.
    pub fn div(&self, f: &VectorField) -> ScalarField {
        let s = self.forward3(f);
        let len = self.grid.len();
        let mut out = vec![C64::new(0.0, 0.0); len];
        let n2 = self.grid.n() * self.grid.n();
        self.exec.for_each_chunk(&mut out, n2, |z, slab| {
            for (off, v) in slab.iter_mut().enumerate() {
                let idx = z * n2 + off;
                if self.kept(idx) {
                    let k = self.wavevector(idx);
                    let dot = s[0][idx] * k[0] + s[1][idx] * k[1] + s[2][idx] * k[2];
                    *v = C64::new(0.0, 1.0) * dot;
                }
            }
        });
        self.inverse(out)
    }

    /// `∇u` via `i k`.
    pub fn grad(&self, u: &[f64]) -> VectorField {
        let s = self.forward(u);
        let comp = |c: usize| self.inverse(self.map_modes(&s, move |k, v| C64::new(0.0, k[c]) * v));
        VectorField([comp(0), comp(1), comp(2)])
    }

    /// Solves `−Δu = f` for the zero-mean `u`; the mean of `f` and modes with
    /// vanishing derivative wavevector are dropped.
    pub fn solve_poisson(&self, f: &[f64]) -> ScalarField {
        let s = self.forward(f);
        self.inverse(self.map_modes(&s, |k, v| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 > 0.0 {
                v / k2
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// Divergence-free `A` with `∇∧A = B` for solenoidal, zero-mean `B`:
    /// `Â = i k ∧ B̂ / |k|²`.
    pub fn inverse_curl(&self, b: &VectorField) -> VectorField {
        let s = self.forward3(b);
        self.inverse3(self.map_modes3(&s, |k, v| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 > 0.0 {
                curl_mode(k, v).map(|c| c / k2)
            } else {
                [C64::new(0.0, 0.0); 3]
            }
        }))
    }
}

#[inline]
fn curl_mode(k: [f64; 3], v: [C64; 3]) -> [C64; 3] {
    let i = C64::new(0.0, 1.0);
    [
        i * (v[2] * k[1] - v[1] * k[2]),
        i * (v[0] * k[2] - v[2] * k[0]),
        i * (v[1] * k[0] - v[0] * k[1]),
    ]
}
