//! Grid quadratures of the field energy, momentum and angular momentum.

use super::{FieldState, GridSpec};
use crate::par::Execution;
use crate::Vec3;

/// Boundary-to-peak field magnitude above which the angular momentum
/// quadrature is flagged unreliable.
pub const BOUNDARY_RATIO_LIMIT: f64 = 1e-6;

fn slab_sum<const N: usize>(grid: &GridSpec, f: impl Fn(usize) -> [f64; N] + Sync + Send) -> [f64; N] {
    let n2 = grid.n() * grid.n();
    let mut total = Execution::default().ordered_sum(grid.n(), |z| {
        let mut acc = [0.0; N];
        for idx in z * n2..(z + 1) * n2 {
            for (a, v) in acc.iter_mut().zip(f(idx)) {
                *a += v;
            }
        }
        acc
    });
    let dv = grid.cell_volume();
    total.iter_mut().for_each(|v| *v *= dv);
    total
}

/// `½ Σ (|E|² + |B|²) dx³`.
pub fn field_energy(grid: &GridSpec, f: &FieldState) -> f64 {
    let [s] = slab_sum(grid, |i| [f.e.at(i).norm_squared() + f.b.at(i).norm_squared()]);
    0.5 * s
}

/// `Σ E∧B dx³`.
pub fn field_momentum(grid: &GridSpec, f: &FieldState) -> Vec3 {
    let s = slab_sum(grid, |i| {
        let p = f.e.at(i).cross(&f.b.at(i));
        [p.x, p.y, p.z]
    });
    Vec3::from(s)
}

/// Largest `√(|E|²+|B|²)` on the boundary faces relative to its grid maximum.
pub fn boundary_ratio(grid: &GridSpec, f: &FieldState) -> f64 {
    let mag = |i: usize| (f.e.at(i).norm_squared() + f.b.at(i).norm_squared()).sqrt();
    let peak = (0..grid.len()).map(mag).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let edge = (0..grid.len())
        .filter(|&i| {
            let (x, y, z) = grid.unflatten(i);
            x == 0 || y == 0 || z == 0
        })
        .map(mag)
        .fold(0.0, f64::max);
    edge / peak
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAngularMomentum {
    pub value: Vec3,
    pub boundary_ratio: f64,
    /// False when fields at the boundary are not negligible, so the
    /// non-periodic integrand `x∧(E∧B)` depends on the box.
    pub reliable: bool,
}

/// `Σ x∧(E∧B) dx³` with box-centred `x`.
pub fn field_angular_momentum(grid: &GridSpec, f: &FieldState) -> FieldAngularMomentum {
    let s = slab_sum(grid, |i| {
        let x = Vec3::from(grid.point(i));
        let m = x.cross(&f.e.at(i).cross(&f.b.at(i)));
        [m.x, m.y, m.z]
    });
    let ratio = boundary_ratio(grid, f);
    FieldAngularMomentum {
        value: Vec3::from(s),
        boundary_ratio: ratio,
        reliable: ratio <= BOUNDARY_RATIO_LIMIT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::VectorField;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_electric_only() {
        let g = GridSpec::new(16, 4.0).unwrap();
        let z = FieldState::zeros(&g);
        assert_eq!(field_energy(&g, &z), 0.0);
        assert_eq!(field_momentum(&g, &z), Vec3::zeros());
        let m = field_angular_momentum(&g, &z);
        assert_eq!(m.value, Vec3::zeros());
        assert!(m.reliable);

        let e = VectorField::from_fn(&g, |x| [x[0].sin(), 1.0, x[2] * x[1]]);
        let f = FieldState { e: e.clone(), b: VectorField::zeros(&g) };
        let direct: f64 = (0..g.len()).map(|i| e.at(i).norm_squared()).sum::<f64>() * 0.5 * g.cell_volume();
        assert!((field_energy(&g, &f) - direct).abs() < 1e-12 * direct);
        assert_eq!(field_momentum(&g, &f), Vec3::zeros());
        assert_eq!(field_angular_momentum(&g, &f).value, Vec3::zeros());
    }

    #[test]
    fn standing_mode_energy() {
        // E = e_y sin(kx), B = e_z cos(kx): ½∫(sin² + cos²) = ½L³
        let l = 6.0;
        let g = GridSpec::new(24, l).unwrap();
        let k = 2.0 * PI / l * 3.0;
        let f = FieldState {
            e: VectorField::from_fn(&g, |x| [0.0, (k * x[0]).sin(), 0.0]),
            b: VectorField::from_fn(&g, |x| [0.0, 0.0, (k * x[0]).cos()]),
        };
        assert!((field_energy(&g, &f) - 0.5 * l.powi(3)).abs() < 1e-8);
        // E∧B = e_x sin cos integrates to zero
        assert!(field_momentum(&g, &f).norm() < 1e-12);
        assert!(!field_angular_momentum(&g, &f).reliable);
    }

    #[test]
    fn localized_field_is_reliable() {
        let g = GridSpec::new(32, 24.0).unwrap();
        let f = FieldState {
            e: VectorField::from_fn(&g, |x| {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                [(-r2).exp(), 0.0, 0.0]
            }),
            b: VectorField::from_fn(&g, |x| {
                let r2 = (x[0] - 0.5).powi(2) + x[1] * x[1] + x[2] * x[2];
                [0.0, (-r2).exp(), 0.0]
            }),
        };
        let m = field_angular_momentum(&g, &f);
        assert!(m.reliable);
        // E∧B ∥ e_z, centred on x ≈ 0.25: M_y = −∫x (E∧B)_z ≠ 0, M_z = 0
        assert!(m.value.y < 0.0);
        assert!(m.value.z.abs() < 1e-15);
    }
}
