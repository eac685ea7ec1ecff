//! Rigid rotation on SO(3): moment of inertia of a radial profile, the
//! vector equation `d/dt ∂L̂/∂ω = ω ∧ ∂L̂/∂ω`, and the exponential rotation
//! update.

use std::f64::consts::PI;

use crate::poincare::{solve_symmetric, DVec, PoincareLagrangian, So3Chart};
use crate::so3::{reorthonormalize, so3_exp, Rotation};
use crate::{Error, Mat3, Result, Vec3};

/// Inertia of the body.
///
/// `Matrix` is an extension beyond the radially symmetric case: the tensor is
/// held fixed in space, so `L̂ = ½ ω·Iω` stays independent of `R`. This is
/// not the physical tumbling top, whose spatial inertia rotates with the body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inertia {
    Scalar(f64),
    Matrix(Mat3),
}

impl Inertia {
    pub fn scalar(i: f64) -> Result<Self> {
        if !(i > 0.0 && i.is_finite()) {
            return Err(Error::InvalidBody(format!("moment of inertia must be positive, got {i}")));
        }
        Ok(Inertia::Scalar(i))
    }

    /// Symmetric positive-definite tensor (checked by Cholesky).
    pub fn matrix(m: Mat3) -> Result<Self> {
        if (m - m.transpose()).amax() > 1e-12 * m.amax() {
            return Err(Error::InvalidBody("inertia tensor is not symmetric".into()));
        }
        if m.cholesky().is_none() {
            return Err(Error::InvalidBody("inertia tensor is not positive definite".into()));
        }
        Ok(Inertia::Matrix(m))
    }

    pub fn as_matrix(&self) -> Mat3 {
        match *self {
            Inertia::Scalar(i) => Mat3::identity() * i,
            Inertia::Matrix(m) => m,
        }
    }

    pub fn apply(&self, w: &Vec3) -> Vec3 {
        match self {
            Inertia::Scalar(i) => w * *i,
            Inertia::Matrix(m) => m * w,
        }
    }

    pub fn solve(&self, p: &Vec3) -> Result<Vec3> {
        match self {
            Inertia::Scalar(i) => Ok(p / *i),
            Inertia::Matrix(m) => m.cholesky().map(|c| c.solve(p)).ok_or(Error::SingularHessian),
        }
    }

    /// For each axis `e_k`, whether `½ ω·Iω` is invariant under rotations
    /// about `e_k`, i.e. `I` commutes with `hat(e_k)`.
    pub fn rotational_symmetry(&self) -> [bool; 3] {
        let m = self.as_matrix();
        let scale = m.amax();
        std::array::from_fn(|k| {
            let e = crate::so3::basis_hat(k).expect("axis in range");
            (m * e - e * m).amax() <= 1e-12 * scale
        })
    }
}

/// `L̂(ω) = ½ ω·Iω`.
#[derive(Debug, Clone, Copy)]
pub struct BodySpec {
    pub inertia: Inertia,
}

impl BodySpec {
    pub fn new(inertia: Inertia) -> Self {
        BodySpec { inertia }
    }

    pub fn energy(&self, w: &Vec3) -> f64 {
        0.5 * w.dot(&self.inertia.apply(w))
    }

    pub fn angular_momentum(&self, w: &Vec3) -> Vec3 {
        self.inertia.apply(w)
    }
}

fn vec3(v: &DVec) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

impl PoincareLagrangian for BodySpec {
    fn value(&self, _g: &DVec, omega: &DVec) -> f64 {
        self.energy(&vec3(omega))
    }
    fn d_omega(&self, _g: &DVec, omega: &DVec) -> DVec {
        DVec::from_column_slice(self.inertia.apply(&vec3(omega)).as_slice())
    }
    fn depends_on_point(&self) -> bool {
        false
    }
    fn omega_hessian_solve(&self, _g: &DVec, _omega: &DVec, rhs: &DVec) -> Result<DVec> {
        solve_symmetric(nalgebra::DMatrix::from_column_slice(3, 3, self.inertia.as_matrix().as_slice()), rhs)
    }
}

/// Default charge support in units of `σ`.
pub const DEFAULT_CUTOFF_SIGMAS: f64 = 6.0;

/// Normalized Gaussian `ρ(x) = (2πσ²)^{-3/2} exp(-|x|²/2σ²)`.
///
/// `cutoff_radius` bounds the region where the profile is treated as
/// supported; it drives the box-size guard, not the density itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeProfile {
    pub sigma: f64,
    pub cutoff_radius: f64,
}

impl ChargeProfile {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::with_cutoff(sigma, DEFAULT_CUTOFF_SIGMAS * sigma)
    }

    pub fn with_cutoff(sigma: f64, cutoff_radius: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidBody(format!("sigma must be positive, got {sigma}")));
        }
        if !(cutoff_radius > 0.0) {
            return Err(Error::InvalidBody(format!("cutoff radius must be positive, got {cutoff_radius}")));
        }
        Ok(ChargeProfile { sigma, cutoff_radius })
    }

    pub fn radial(&self, r: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (2.0 * PI * s2).powf(-1.5) * (-0.5 * r * r / s2).exp()
    }

    pub fn density(&self, x: &Vec3) -> f64 {
        self.radial(x.norm())
    }

    /// `∇ρ(x) = -x ρ(x)/σ²`.
    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        -x * (self.density(x) / (self.sigma * self.sigma))
    }
}

/// Radial quadrature controls for [`moment_of_inertia`].
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    /// Outer radius in units of `σ`.
    pub radius_sigmas: f64,
    /// Relative change between successive refinements at which to stop.
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            radius_sigmas: 12.0,
            rel_tol: 1e-10,
            max_doublings: 20,
        }
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, b: f64, panels: usize) -> f64 {
    let h = b / panels as f64;
    let mut acc = f(0.0) + f(b);
    for i in 1..panels {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `∫₀^R f(r) dr` by composite Simpson, doubling panels until converged.
pub fn radial_integral(f: &dyn Fn(f64) -> f64, r_max: f64, q: &Quadrature) -> Result<f64> {
    let mut panels = 16;
    let mut prev = simpson(f, r_max, panels);
    for _ in 0..q.max_doublings {
        panels *= 2;
        let next = simpson(f, r_max, panels);
        if (next - prev).abs() <= q.rel_tol * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!("no convergence with {panels} panels")))
}

/// `(2/3)∫|x|²ρ(x)dx` for a radial profile `ρ_r`, together with `∫ρ dx`.
///
/// Fails when the integrand at `r_max` is not negligible, i.e. the profile
/// has not decayed.
pub fn radial_moment(rho: &dyn Fn(f64) -> f64, r_max: f64, q: &Quadrature) -> Result<(f64, f64)> {
    let second = |r: f64| 4.0 * PI * r.powi(4) * rho(r);
    let mass = radial_integral(&|r| 4.0 * PI * r * r * rho(r), r_max, q)?;
    let m2 = radial_integral(&second, r_max, q)?;
    if second(r_max) * r_max > 1e-12 * m2.abs() {
        return Err(Error::Quadrature(format!("profile has not decayed at r = {r_max}")));
    }
    Ok((2.0 / 3.0 * m2, mass))
}

/// Moment of inertia `I = (2/3)∫|x|²ρ dx` of the profile.
pub fn moment_of_inertia(profile: &ChargeProfile, q: &Quadrature) -> Result<f64> {
    let (i, mass) = radial_moment(&|r| profile.radial(r), q.radius_sigmas * profile.sigma, q)?;
    if (mass - 1.0).abs() > 1e-8 {
        return Err(Error::Quadrature(format!("profile normalization {mass} differs from 1")));
    }
    Ok(i)
}

/// `ω̇` from `d/dt L̂_ω = ω ∧ L̂_ω` for a Lagrangian depending on `ω` only.
pub fn spatial_euler_rhs<L: PoincareLagrangian + ?Sized>(l: &L, omega: &Vec3) -> Result<Vec3> {
    let g = So3Chart::to_ambient(&Mat3::identity());
    let w = DVec::from_column_slice(omega.as_slice());
    let p = vec3(&l.d_omega(&g, &w));
    let p_dot = omega.cross(&p);
    Ok(vec3(&l.omega_hessian_solve(&g, &w, &DVec::from_column_slice(p_dot.as_slice()))?))
}

/// `R ← exp(dt·hat(ω)) R`.
pub fn rotation_step(r: &Rotation, omega: &Vec3, dt: f64) -> Rotation {
    so3_exp(&(omega * dt)).compose(r)
}

/// Orientation and spatial angular velocity of a free body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopState {
    pub r: Rotation,
    pub omega: Vec3,
}

/// RK4 in `ω`; `R` advanced by the exponential update with the RK4-weighted
/// stage velocity, then re-orthonormalized.
pub fn top_rk4_step<L: PoincareLagrangian + ?Sized>(l: &L, s: &TopState, dt: f64) -> Result<TopState> {
    let k1 = spatial_euler_rhs(l, &s.omega)?;
    let w2 = s.omega + k1 * (0.5 * dt);
    let k2 = spatial_euler_rhs(l, &w2)?;
    let w3 = s.omega + k2 * (0.5 * dt);
    let k3 = spatial_euler_rhs(l, &w3)?;
    let w4 = s.omega + k3 * dt;
    let k4 = spatial_euler_rhs(l, &w4)?;
    let omega = s.omega + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let w_avg = (s.omega + w2 * 2.0 + w3 * 2.0 + w4) / 6.0;
    let r = reorthonormalize(rotation_step(&s.r, &w_avg, dt).matrix())?;
    Ok(TopState { r, omega })
}
