//! Charge and current densities of the extended particle sampled on the grid.

use super::{GridSpec, ScalarField, VectorField};
use crate::par::Execution;
use crate::rigid_body::ChargeProfile;
use crate::{Error, Result, Vec3};

/// Fails when the profile's support radius exceeds half the box.
pub fn check_support(profile: &ChargeProfile, grid: &GridSpec) -> Result<()> {
    let half_box = 0.5 * grid.box_length();
    if profile.cutoff_radius > half_box {
        return Err(Error::SupportExceedsBox {
            support: profile.cutoff_radius,
            half_box,
        });
    }
    Ok(())
}

/// Per-axis minimum-image displacements `x − q` and Gaussian factors for a
/// particle at `q`; the density factorizes as `ρ = c·g_x g_y g_z`.
#[derive(Debug, Clone)]
pub struct ParticleStencil {
    grid: GridSpec,
    norm: f64,
    inv_sigma2: f64,
    disp: [Vec<f64>; 3],
    gauss: [Vec<f64>; 3],
}

impl ParticleStencil {
    pub fn new(profile: &ChargeProfile, q: &Vec3, grid: &GridSpec) -> Result<Self> {
        check_support(profile, grid)?;
        let s2 = profile.sigma * profile.sigma;
        let disp: [Vec<f64>; 3] =
            std::array::from_fn(|a| (0..grid.n()).map(|i| grid.min_image(grid.coord(i) - q[a])).collect());
        let gauss = std::array::from_fn(|a| disp[a].iter().map(|d| (-0.5 * d * d / s2).exp()).collect());
        Ok(ParticleStencil {
            grid: *grid,
            norm: (2.0 * std::f64::consts::PI * s2).powf(-1.5),
            inv_sigma2: 1.0 / s2,
            disp,
            gauss,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn density(&self, idx: usize) -> f64 {
        let (i, j, l) = self.grid.unflatten(idx);
        self.norm * self.gauss[0][i] * self.gauss[1][j] * self.gauss[2][l]
    }

    /// Minimum-image `x − q` at grid point `idx`.
    #[inline]
    pub fn displacement(&self, idx: usize) -> Vec3 {
        let (i, j, l) = self.grid.unflatten(idx);
        Vec3::new(self.disp[0][i], self.disp[1][j], self.disp[2][l])
    }

    /// `∇ρ(x − q) = −(x − q) ρ/σ²`.
    #[inline]
    pub fn density_gradient(&self, idx: usize) -> Vec3 {
        -self.displacement(idx) * (self.density(idx) * self.inv_sigma2)
    }

    pub fn density_field(&self, exec: Execution) -> ScalarField {
        let mut out = vec![0.0; self.grid.len()];
        let n2 = self.grid.n() * self.grid.n();
        exec.for_each_chunk(&mut out, n2, |z, slab| {
            for (off, v) in slab.iter_mut().enumerate() {
                *v = self.density(z * n2 + off);
            }
        });
        out
    }

    /// `j = (q̇ + ω ∧ (x − q)) ρ(x − q)`.
    pub fn current_field(&self, qdot: &Vec3, omega: &Vec3, exec: Execution) -> VectorField {
        let n2 = self.grid.n() * self.grid.n();
        let mut tri = vec![[0.0; 3]; self.grid.len()];
        exec.for_each_chunk(&mut tri, n2, |z, slab| {
            for (off, v) in slab.iter_mut().enumerate() {
                let idx = z * n2 + off;
                let j = (qdot + omega.cross(&self.displacement(idx))) * self.density(idx);
                *v = [j.x, j.y, j.z];
            }
        });
        VectorField(std::array::from_fn(|c| tri.iter().map(|t| t[c]).collect()))
    }
}

/// Grid samples of `ρ(x − q)` with minimum-image distances.
pub fn sample_density(profile: &ChargeProfile, q: &Vec3, grid: &GridSpec) -> Result<ScalarField> {
    Ok(ParticleStencil::new(profile, q, grid)?.density_field(Execution::default()))
}

/// Grid samples of `(q̇ + ω ∧ (x − q)) ρ(x − q)`.
pub fn current_density(
    profile: &ChargeProfile,
    q: &Vec3,
    qdot: &Vec3,
    omega: &Vec3,
    grid: &GridSpec,
) -> Result<VectorField> {
    Ok(ParticleStencil::new(profile, q, grid)?.current_field(qdot, omega, Execution::default()))
}
