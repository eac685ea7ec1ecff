//! Lagrangians in Poincaré variables and their finite-difference fallbacks.

use nalgebra::DMatrix;

use super::frame::{DVec, FrameChart};
use crate::{Error, Result};

/// Relative step used by the finite-difference fallbacks.
pub const FD_REL_STEP: f64 = 1e-5;

pub(crate) fn fd_step(x: &DVec) -> f64 {
    FD_REL_STEP * (1.0 + x.amax())
}

/// Central-difference gradient of `f` at `x`.
pub fn fd_gradient(x: &DVec, f: impl Fn(&DVec) -> f64) -> DVec {
    let h = fd_step(x);
    DVec::from_fn(x.len(), |i, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

/// Central-difference Jacobian of a vector function, symmetrized.
pub fn fd_symmetric_jacobian(x: &DVec, f: impl Fn(&DVec) -> DVec) -> DMatrix<f64> {
    let h = fd_step(x);
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        jac.set_column(j, &((f(&xp) - f(&xm)) / (2.0 * h)));
    }
    (&jac + jac.transpose()) * 0.5
}

/// Solves `a x = b` by LU, rejecting singular or badly conditioned systems.
pub fn solve_symmetric(a: DMatrix<f64>, b: &DVec) -> Result<DVec> {
    let scale = a.amax();
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::SingularHessian);
    }
    let x = a.clone().lu().solve(b).ok_or(Error::SingularHessian)?;
    let residual = (&a * &x - b).amax();
    if !x.iter().all(|v| v.is_finite()) || residual > 1e-8 * (scale * x.amax()).max(b.amax()).max(1e-300) {
        return Err(Error::SingularHessian);
    }
    Ok(x)
}

/// `L̂(g, ω)`: a Lagrangian written in frame velocity coordinates.
///
/// Only [`value`](PoincareLagrangian::value) is required; derivatives fall
/// back to central differences with step `1e-5·(1 + |·|∞)`.
pub trait PoincareLagrangian {
    fn value(&self, g: &DVec, omega: &DVec) -> f64;

    /// `∂L̂/∂ω`.
    fn d_omega(&self, g: &DVec, omega: &DVec) -> DVec {
        fd_gradient(omega, |w| self.value(g, w))
    }

    /// False when `L̂` has no explicit dependence on the point `g`.
    fn depends_on_point(&self) -> bool {
        true
    }

    /// `v_k(g) L̂`, the derivative of `L̂` along the k-th frame field at fixed ω.
    fn frame_derivative(&self, chart: &dyn FrameChart, g: &DVec, omega: &DVec, k: usize) -> f64 {
        if !self.depends_on_point() {
            return 0.0;
        }
        let v = chart.frame(g).column(k).into_owned();
        let h = fd_step(g);
        (self.value(&(g + &v * h), omega) - self.value(&(g - &v * h), omega)) / (2.0 * h)
    }

    /// Solves `(∂²L̂/∂ω²) x = rhs`.
    fn omega_hessian_solve(&self, g: &DVec, omega: &DVec, rhs: &DVec) -> Result<DVec> {
        let hess = fd_symmetric_jacobian(omega, |w| self.d_omega(g, w));
        solve_symmetric(hess, rhs)
    }
}

impl<T: PoincareLagrangian + ?Sized> PoincareLagrangian for &T {
    fn value(&self, g: &DVec, omega: &DVec) -> f64 {
        (**self).value(g, omega)
    }
    fn d_omega(&self, g: &DVec, omega: &DVec) -> DVec {
        (**self).d_omega(g, omega)
    }
    fn depends_on_point(&self) -> bool {
        (**self).depends_on_point()
    }
    fn frame_derivative(&self, chart: &dyn FrameChart, g: &DVec, omega: &DVec, k: usize) -> f64 {
        (**self).frame_derivative(chart, g, omega, k)
    }
    fn omega_hessian_solve(&self, g: &DVec, omega: &DVec, rhs: &DVec) -> Result<DVec> {
        (**self).omega_hessian_solve(g, omega, rhs)
    }
}

/// `L̂ = ½ ωᵀ M ω − U(g)` with a constant symmetric positive-definite `M`.
pub struct QuadraticLagrangian<U> {
    pub mass: DMatrix<f64>,
    pub potential: U,
    pub point_dependent: bool,
}

impl QuadraticLagrangian<fn(&DVec) -> f64> {
    /// Purely kinetic `½ ωᵀ M ω`.
    pub fn kinetic(mass: DMatrix<f64>) -> Self {
        fn zero(_: &DVec) -> f64 {
            0.0
        }
        QuadraticLagrangian {
            mass,
            potential: zero,
            point_dependent: false,
        }
    }
}

impl<U: Fn(&DVec) -> f64> QuadraticLagrangian<U> {
    pub fn with_potential(mass: DMatrix<f64>, potential: U) -> Self {
        QuadraticLagrangian {
            mass,
            potential,
            point_dependent: true,
        }
    }
}

impl<U: Fn(&DVec) -> f64> PoincareLagrangian for QuadraticLagrangian<U> {
    fn value(&self, g: &DVec, omega: &DVec) -> f64 {
        0.5 * omega.dot(&(&self.mass * omega)) - (self.potential)(g)
    }
    fn d_omega(&self, _g: &DVec, omega: &DVec) -> DVec {
        &self.mass * omega
    }
    fn depends_on_point(&self) -> bool {
        self.point_dependent
    }
    fn omega_hessian_solve(&self, _g: &DVec, _omega: &DVec, rhs: &DVec) -> Result<DVec> {
        solve_symmetric(self.mass.clone(), rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quartic;
    impl PoincareLagrangian for Quartic {
        fn value(&self, g: &DVec, w: &DVec) -> f64 {
            0.25 * w.norm_squared().powi(2) + 0.5 * w.norm_squared() + g[0] * w[1]
        }
    }

    #[test]
    fn fd_gradient_is_second_order() {
        let g = DVec::from_vec(vec![0.3]);
        let w = DVec::from_vec(vec![0.5, -1.0, 2.0]);
        let exact = &w * (w.norm_squared() + 1.0) + DVec::from_vec(vec![0.0, 0.3, 0.0]);
        assert!((Quartic.d_omega(&g, &w) - exact).amax() < 1e-8);
    }

    #[test]
    fn fd_hessian_solve_inverts() {
        let g = DVec::from_vec(vec![0.3]);
        let w = DVec::from_vec(vec![0.5, -1.0, 2.0]);
        let rhs = DVec::from_vec(vec![1.0, 2.0, 3.0]);
        let x = Quartic.omega_hessian_solve(&g, &w, &rhs).unwrap();
        // analytic Hessian: (|w|²+1) I + 2 w wᵀ
        let hess = DMatrix::identity(3, 3) * (w.norm_squared() + 1.0) + &w * w.transpose() * 2.0;
        assert!((hess * x - rhs).amax() < 1e-5);
    }

    #[test]
    fn quadratic_hessian_residual() {
        let m = DMatrix::from_diagonal(&DVec::from_vec(vec![1.0, 2.0, 3.0]));
        let l = QuadraticLagrangian::kinetic(m.clone());
        let rhs = DVec::from_vec(vec![1.0, -1.0, 0.5]);
        let x = l.omega_hessian_solve(&DVec::zeros(9), &DVec::zeros(3), &rhs).unwrap();
        assert!((m * x - rhs).amax() < 1e-10);
    }

    #[test]
    fn singular_hessian_is_rejected() {
        let l = QuadraticLagrangian::kinetic(DMatrix::zeros(3, 3));
        let rhs = DVec::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(matches!(
            l.omega_hessian_solve(&DVec::zeros(9), &DVec::zeros(3), &rhs),
            Err(Error::SingularHessian)
        ));
        let rank1 = DMatrix::from_diagonal(&DVec::from_vec(vec![1.0, 0.0, 0.0]));
        let l = QuadraticLagrangian::kinetic(rank1);
        assert!(l
            .omega_hessian_solve(&DVec::zeros(9), &DVec::zeros(3), &DVec::from_vec(vec![0.0, 1.0, 0.0]))
            .is_err());
    }
}
