//! Lagrange–Poincaré systems: Euler–Lagrange variables `(X, V)` on ℝᵈ
//! coupled to Poincaré variables `(g, ω)` on a frame-equipped manifold.

use nalgebra::DMatrix;

use super::equations::{bracket_term, directional_fd, SymmetryCurrent};
use super::frame::{check_len, DVec, FrameChart};
use super::integrate::rk4_vectors;
use super::lagrangian::{fd_gradient, fd_step, fd_symmetric_jacobian, solve_symmetric};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedState {
    pub x: DVec,
    pub v: DVec,
    pub g: DVec,
    pub omega: DVec,
}

impl CombinedState {
    pub fn new(x: DVec, v: DVec, g: DVec, omega: DVec) -> Self {
        CombinedState { x, v, g, omega }
    }
}

fn concat(a: &DVec, b: &DVec) -> DVec {
    DVec::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

fn split(z: &DVec, d: usize) -> (DVec, DVec) {
    (z.rows(0, d).into_owned(), z.rows(d, z.len() - d).into_owned())
}

/// `L̂(X, V, g, ω)`. Only [`value`](CombinedLagrangian::value) is required.
pub trait CombinedLagrangian {
    fn value(&self, s: &CombinedState) -> f64;

    /// `(L̂_V, L̂_ω)` stacked.
    fn d_velocities(&self, s: &CombinedState) -> DVec {
        let d = s.v.len();
        fd_gradient(&concat(&s.v, &s.omega), |z| {
            let (v, omega) = split(z, d);
            self.value(&CombinedState { v, omega, ..s.clone() })
        })
    }

    /// `L̂_X`.
    fn d_x(&self, s: &CombinedState) -> DVec {
        fd_gradient(&s.x, |x| self.value(&CombinedState { x: x.clone(), ..s.clone() }))
    }

    /// `v_k(g) L̂` at fixed `(X, V, ω)`.
    fn frame_derivative(&self, chart: &dyn FrameChart, s: &CombinedState, k: usize) -> f64 {
        let v = chart.frame(&s.g).column(k).into_owned();
        let h = fd_step(&s.g);
        let at = |g: DVec| self.value(&CombinedState { g, ..s.clone() });
        (at(&s.g + &v * h) - at(&s.g - &v * h)) / (2.0 * h)
    }

    /// False when `L̂` depends on neither `X` nor `g`.
    fn depends_on_configuration(&self) -> bool {
        true
    }

    /// Solves the joint velocity Hessian `∂²L̂/∂(V,ω)²` against `rhs`.
    fn velocity_hessian_solve(&self, s: &CombinedState, rhs: &DVec) -> Result<DVec> {
        let d = s.v.len();
        let hess = fd_symmetric_jacobian(&concat(&s.v, &s.omega), |z| {
            let (v, omega) = split(z, d);
            self.d_velocities(&CombinedState { v, omega, ..s.clone() })
        });
        solve_symmetric(hess, rhs)
    }
}

/// `V̇, Ẋ, ġ, ω̇` for `d/dt L̂_V = L̂_X` and the Poincaré equations in `(g, ω)`.
pub struct LagrangePoincareRhs {
    pub x_dot: DVec,
    pub v_dot: DVec,
    pub g_dot: DVec,
    pub omega_dot: DVec,
}

pub fn lagrange_poincare_rhs<L, C>(l: &L, chart: &C, s: &CombinedState) -> Result<LagrangePoincareRhs>
where
    L: CombinedLagrangian + ?Sized,
    C: FrameChart,
{
    let d = s.x.len();
    let n = chart.dim();
    check_len(d, s.v.len())?;
    check_len(n, s.omega.len())?;
    check_len(chart.ambient_dim(), s.g.len())?;

    let g_dot = chart.frame(&s.g) * &s.omega;
    let p = l.d_velocities(s);
    let (_, p_omega) = split(&p, d);
    let c = chart.structure(&s.g);
    let mut p_omega_dot = bracket_term(&c, &s.omega, &p_omega);
    let mut p_v_dot = DVec::zeros(d);
    if l.depends_on_configuration() {
        p_v_dot = l.d_x(s);
        for k in 0..n {
            p_omega_dot[k] += l.frame_derivative(chart, s, k);
        }
    }
    let mut rhs = concat(&p_v_dot, &p_omega_dot);
    if l.depends_on_configuration() {
        let config = concat(&s.x, &s.g);
        if let Some(mixed) = directional_fd(&config, &concat(&s.v, &g_dot), |z| {
            let (x, g) = split(z, d);
            l.d_velocities(&CombinedState { x, g, ..s.clone() })
        }) {
            rhs -= mixed;
        }
    }
    let acc = l.velocity_hessian_solve(s, &rhs)?;
    let (v_dot, omega_dot) = split(&acc, d);
    Ok(LagrangePoincareRhs {
        x_dot: s.v.clone(),
        v_dot,
        g_dot,
        omega_dot,
    })
}

/// `E = L̂_V·V + L̂_ω·ω − L̂`.
pub fn combined_energy<L: CombinedLagrangian + ?Sized>(l: &L, s: &CombinedState) -> f64 {
    l.d_velocities(s).dot(&concat(&s.v, &s.omega)) - l.value(s)
}

/// `L̂_V·(dh₁ˢX/ds)|₀ + Σ L̂_{ω_k} w_k(g)`. `h1` maps `X` to its flow
/// derivative; `h2` is the symmetry current on the manifold.
pub fn combined_invariant<L, C>(
    l: &L,
    chart: &C,
    s: &CombinedState,
    h1: &dyn Fn(&DVec) -> DVec,
    h2: &SymmetryCurrent,
) -> Result<f64>
where
    L: CombinedLagrangian + ?Sized,
    C: FrameChart + ?Sized,
{
    let d = s.x.len();
    let (p_v, p_omega) = split(&l.d_velocities(s), d);
    let dx = h1(&s.x);
    check_len(d, dx.len())?;
    Ok(p_v.dot(&dx) + p_omega.dot(&h2.at(chart, &s.g)?))
}

/// RK4 step for the combined system, projecting `g` after the full step.
pub fn lagrange_poincare_rk4_step<L, C>(l: &L, chart: &C, s: &CombinedState, dt: f64) -> Result<CombinedState>
where
    L: CombinedLagrangian + ?Sized,
    C: FrameChart,
{
    if !dt.is_finite() {
        return Err(Error::InvalidStep(dt));
    }
    let y = [s.x.clone(), s.v.clone(), s.g.clone(), s.omega.clone()];
    let out = rk4_vectors(&y, dt, |y| {
        let st = CombinedState::new(y[0].clone(), y[1].clone(), y[2].clone(), y[3].clone());
        let r = lagrange_poincare_rhs(l, chart, &st)?;
        Ok(vec![r.x_dot, r.v_dot, r.g_dot, r.omega_dot])
    })?;
    let mut it = out.into_iter();
    let x = it.next().expect("x");
    let v = it.next().expect("v");
    let g = chart.project(it.next().expect("g"))?;
    Ok(CombinedState::new(x, v, g, it.next().expect("omega")))
}

/// `L̂ = ½ [V;ω]ᵀ M [V;ω] − U(X, g)` with constant symmetric `M`.
pub struct QuadraticCombined<U> {
    pub mass: DMatrix<f64>,
    pub potential: U,
}

impl<U: Fn(&DVec, &DVec) -> f64> CombinedLagrangian for QuadraticCombined<U> {
    fn value(&self, s: &CombinedState) -> f64 {
        let z = concat(&s.v, &s.omega);
        0.5 * z.dot(&(&self.mass * &z)) - (self.potential)(&s.x, &s.g)
    }
    fn d_velocities(&self, s: &CombinedState) -> DVec {
        &self.mass * concat(&s.v, &s.omega)
    }
    fn velocity_hessian_solve(&self, _s: &CombinedState, rhs: &DVec) -> Result<DVec> {
        solve_symmetric(self.mass.clone(), rhs)
    }
}
