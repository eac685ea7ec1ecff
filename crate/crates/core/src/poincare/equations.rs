//! Poincaré equations, their energy and symmetry invariants, and the
//! transport relation for two-parameter families.

use super::frame::{check_len, current_from_flow, frame_solve, DVec, FrameChart, So3Chart};
use super::lagrangian::{fd_step, PoincareLagrangian};
use crate::so3::{basis_hat, StructureConstants};
use crate::{Error, Result};

/// A point `g` (ambient coordinates) and frame velocity coordinates `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareState {
    pub g: DVec,
    pub omega: DVec,
}

impl PoincareState {
    pub fn new(g: DVec, omega: DVec) -> Self {
        PoincareState { g, omega }
    }
}

/// Infinitesimal generator of a one-parameter group `h^s`, evaluated as the
/// flow derivative `dh^s g/ds|₀` in ambient coordinates.
pub struct SymmetryCurrent<'f> {
    flow: Box<dyn Fn(&DVec) -> DVec + 'f>,
}

impl<'f> SymmetryCurrent<'f> {
    pub fn from_flow(flow: impl Fn(&DVec) -> DVec + 'f) -> Self {
        SymmetryCurrent {
            flow: Box::new(flow),
        }
    }

    /// Left rotations `e^{s ẽ_axis} R` on SO(3).
    pub fn so3_rotation(axis: usize) -> Result<Self> {
        let e = basis_hat(axis)?;
        Ok(Self::from_flow(move |g| {
            So3Chart::to_ambient(&(e * So3Chart::from_ambient(g)))
        }))
    }

    pub fn flow_derivative(&self, g: &DVec) -> DVec {
        (self.flow)(g)
    }

    /// The current `w(g)`: frame coordinates of the flow derivative.
    pub fn at<C: FrameChart + ?Sized>(&self, chart: &C, g: &DVec) -> Result<DVec> {
        current_from_flow(chart, g, &self.flow_derivative(g))
    }
}

/// `E = L̂_ω·ω − L̂`.
pub fn poincare_energy<L: PoincareLagrangian + ?Sized>(l: &L, s: &PoincareState) -> f64 {
    l.d_omega(&s.g, &s.omega).dot(&s.omega) - l.value(&s.g, &s.omega)
}

/// `I = Σ L̂_{ω_k} w_k(g)`.
pub fn poincare_invariant<L, C>(l: &L, chart: &C, s: &PoincareState, w: &SymmetryCurrent) -> Result<f64>
where
    L: PoincareLagrangian + ?Sized,
    C: FrameChart + ?Sized,
{
    let current = w.at(chart, &s.g)?;
    Ok(l.d_omega(&s.g, &s.omega).dot(&current))
}

/// `ṗ_k = Σ_ij c^j_ik ω_i p_j`.
pub(crate) fn bracket_term(c: &StructureConstants, omega: &DVec, p: &DVec) -> DVec {
    let n = c.dim();
    DVec::from_fn(n, |k, _| {
        let mut acc = 0.0;
        for i in 0..n {
            if omega[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                acc += c.get(j, i, k) * omega[i] * p[j];
            }
        }
        acc
    })
}

/// Central difference of `f` along `dir`, scaled to the length of `dir`.
pub(crate) fn directional_fd(base: &DVec, dir: &DVec, f: impl Fn(&DVec) -> DVec) -> Option<DVec> {
    let len = dir.norm();
    if len == 0.0 {
        return None;
    }
    let u = dir / len;
    let h = fd_step(base);
    Some((f(&(base + &u * h)) - f(&(base - &u * h))) * (len / (2.0 * h)))
}

pub(crate) fn rhs_with_structure<L, C>(
    l: &L,
    chart: &C,
    c: &StructureConstants,
    s: &PoincareState,
) -> Result<(DVec, DVec)>
where
    L: PoincareLagrangian + ?Sized,
    C: FrameChart,
{
    let n = chart.dim();
    check_len(n, s.omega.len())?;
    check_len(chart.ambient_dim(), s.g.len())?;
    let g_dot = chart.frame(&s.g) * &s.omega;
    let p = l.d_omega(&s.g, &s.omega);
    let mut p_dot = bracket_term(c, &s.omega, &p);
    if l.depends_on_point() {
        for k in 0..n {
            p_dot[k] += l.frame_derivative(chart, &s.g, &s.omega, k);
        }
        if let Some(mixed) = directional_fd(&s.g, &g_dot, |g| l.d_omega(g, &s.omega)) {
            p_dot -= mixed;
        }
    }
    let omega_dot = l.omega_hessian_solve(&s.g, &s.omega, &p_dot)?;
    Ok((g_dot, omega_dot))
}

/// Right-hand side of the Poincaré equations:
/// `ġ = Σ ω_k v_k(g)` and `ω̇` from
/// `d/dt L̂_{ω_k} = Σ_ij c^j_ik ω_i L̂_{ω_j} + v_k L̂`.
pub fn poincare_rhs<L, C>(l: &L, chart: &C, s: &PoincareState) -> Result<(DVec, DVec)>
where
    L: PoincareLagrangian + ?Sized,
    C: FrameChart,
{
    rhs_with_structure(l, chart, &chart.structure(&s.g), s)
}

/// Residual of the transport relation
/// `∂_s ω_k = Σ_ij c^k_ij ω_i w_j + ∂_t w_k` for a two-parameter family
/// `g(s, t)`, with every derivative taken by central differences of step `h`.
pub fn transport_residual<C, F>(chart: &C, family: F, s: f64, t: f64, h: f64) -> Result<f64>
where
    C: FrameChart + ?Sized,
    F: Fn(f64, f64) -> DVec,
{
    if !(h > 0.0 && h <= 1e-2) {
        return Err(Error::InvalidStep(h));
    }
    let coords = |s: f64, t: f64, ds: f64, dt: f64| -> Result<DVec> {
        let g = family(s, t);
        let tangent = (family(s + ds, t + dt) - family(s - ds, t - dt)) / (2.0 * h);
        Ok(frame_solve(chart, &g, &tangent)?.0)
    };
    let omega = |s, t| coords(s, t, 0.0, h);
    let w = |s, t| coords(s, t, h, 0.0);

    let omega_s = (omega(s + h, t)? - omega(s - h, t)?) / (2.0 * h);
    let w_t = (w(s, t + h)? - w(s, t - h)?) / (2.0 * h);
    let om = omega(s, t)?;
    let ww = w(s, t)?;
    let c = chart.structure(&family(s, t));
    let n = chart.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let mut bracket = 0.0;
        for i in 0..n {
            for j in 0..n {
                bracket += c.get(k, i, j) * om[i] * ww[j];
            }
        }
        worst = worst.max((omega_s[k] - bracket - w_t[k]).abs());
    }
    Ok(worst)
}
