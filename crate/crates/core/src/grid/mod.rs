//! Fields on a periodic cube `[−L/2, L/2)³` with `n` points per axis.
//!
//! Flat index `(z·n + y)·n + x`; the x index varies fastest.

mod dump;
mod maxwell;
mod quadrature;
mod sources;
mod spectral;

pub use dump::{read_fields, write_fields};
pub use maxwell::{coulomb_init, divergence_residual, gauge_reconstruct, gauss_residual, maxwell_rhs, GaugeFields, SOLENOIDAL_TOL};
pub use quadrature::{
    boundary_ratio, field_angular_momentum, field_energy, field_momentum, FieldAngularMomentum, BOUNDARY_RATIO_LIMIT,
};
pub use sources::{check_support, current_density, sample_density, ParticleStencil};
pub use spectral::{Spectral, C64};

use crate::{Error, Result, Vec3};

pub type ScalarField = Vec<f64>;

/// Uniform periodic grid: `n` even, `n ≥ 16`, spacing `L/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n must be even and at least 16, got {n}")));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {box_length}")));
        }
        Ok(GridSpec { n, box_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of grid index `i` along any axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.box_length + i as f64 * self.dx()
    }

    #[inline]
    pub fn flatten(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.n + y) * self.n + x
    }

    #[inline]
    pub fn unflatten(&self, idx: usize) -> (usize, usize, usize) {
        (idx % self.n, (idx / self.n) % self.n, idx / (self.n * self.n))
    }

    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (i, j, l) = self.unflatten(idx);
        [self.coord(i), self.coord(j), self.coord(l)]
    }

    /// Periodic minimum-image representative of a displacement component.
    #[inline]
    pub fn min_image(&self, d: f64) -> f64 {
        d - self.box_length * (d / self.box_length).round()
    }
}

/// Three scalar fields on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField(pub [ScalarField; 3]);

impl VectorField {
    pub fn zeros(grid: &GridSpec) -> Self {
        VectorField(std::array::from_fn(|_| vec![0.0; grid.len()]))
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for c in 0..3 {
                out.0[c][idx] = v[c];
            }
        }
        out
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Vec3 {
        Vec3::new(self.0[0][idx], self.0[1][idx], self.0[2][idx])
    }

    pub fn len(&self) -> usize {
        self.0[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.0[0].is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        (0..3)
            .flat_map(|c| self.0[c].iter().zip(&other.0[c]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    /// `self += a·other`.
    pub fn add_scaled(&mut self, other: &VectorField, a: f64) {
        for c in 0..3 {
            for (s, o) in self.0[c].iter_mut().zip(&other.0[c]) {
                *s += a * o;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

/// Electric and magnetic fields.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub e: VectorField,
    pub b: VectorField,
}

impl FieldState {
    pub fn zeros(grid: &GridSpec) -> Self {
        FieldState {
            e: VectorField::zeros(grid),
            b: VectorField::zeros(grid),
        }
    }

    pub fn add_scaled(&mut self, other: &FieldState, a: f64) {
        self.e.add_scaled(&other.e, a);
        self.b.add_scaled(&other.b, a);
    }

    pub fn all_finite(&self) -> bool {
        self.e.all_finite() && self.b.all_finite()
    }
}
