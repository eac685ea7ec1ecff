//! RK4 integration of the Poincaré equations with projection onto the manifold.

use super::equations::{poincare_energy, poincare_invariant, rhs_with_structure, PoincareState, SymmetryCurrent};
use super::frame::{DVec, FrameChart};
use super::lagrangian::PoincareLagrangian;
use crate::so3::StructureConstants;
use crate::{Error, Result};

/// Classical RK4 on a tuple of vectors. `f` returns the derivative of each
/// component.
pub(crate) fn rk4_vectors<F>(y: &[DVec], dt: f64, f: F) -> Result<Vec<DVec>>
where
    F: Fn(&[DVec]) -> Result<Vec<DVec>>,
{
    let shifted = |k: &[DVec], a: f64| -> Vec<DVec> { y.iter().zip(k).map(|(y, k)| y + k * a).collect() };
    let k1 = f(y)?;
    let k2 = f(&shifted(&k1, 0.5 * dt))?;
    let k3 = f(&shifted(&k2, 0.5 * dt))?;
    let k4 = f(&shifted(&k3, dt))?;
    Ok((0..y.len())
        .map(|i| &y[i] + (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (dt / 6.0))
        .collect())
}

/// A Lagrangian on a frame-equipped manifold, ready to integrate.
///
/// Structure constants are cached once when the chart declares them constant.
pub struct PoincareSystem<'c, L, C> {
    pub lagrangian: L,
    pub chart: &'c C,
    cached: Option<StructureConstants>,
}

impl<'c, L: PoincareLagrangian, C: FrameChart> PoincareSystem<'c, L, C> {
    pub fn new(lagrangian: L, chart: &'c C, probe: &DVec) -> Self {
        let cached = chart.constant_structure().then(|| chart.structure(probe));
        PoincareSystem {
            lagrangian,
            chart,
            cached,
        }
    }

    pub fn rhs(&self, s: &PoincareState) -> Result<(DVec, DVec)> {
        match &self.cached {
            Some(c) => rhs_with_structure(&self.lagrangian, self.chart, c, s),
            None => rhs_with_structure(&self.lagrangian, self.chart, &self.chart.structure(&s.g), s),
        }
    }

    /// One RK4 step in ambient coordinates, then projection of `g`.
    pub fn rk4_step(&self, s: &PoincareState, dt: f64) -> Result<PoincareState> {
        if !dt.is_finite() {
            return Err(Error::InvalidStep(dt));
        }
        let out = rk4_vectors(&[s.g.clone(), s.omega.clone()], dt, |y| {
            let (g_dot, w_dot) = self.rhs(&PoincareState::new(y[0].clone(), y[1].clone()))?;
            Ok(vec![g_dot, w_dot])
        })?;
        let mut it = out.into_iter();
        let g = self.chart.project(it.next().expect("g"))?;
        Ok(PoincareState::new(g, it.next().expect("omega")))
    }

    /// Advances `steps` times, calling `observe` on the initial and each new state.
    pub fn integrate(
        &self,
        mut s: PoincareState,
        dt: f64,
        steps: usize,
        mut observe: impl FnMut(usize, &PoincareState),
    ) -> Result<PoincareState> {
        observe(0, &s);
        for i in 1..=steps {
            s = self.rk4_step(&s, dt)?;
            observe(i, &s);
        }
        Ok(s)
    }

    pub fn energy(&self, s: &PoincareState) -> f64 {
        poincare_energy(&self.lagrangian, s)
    }

    pub fn invariant(&self, s: &PoincareState, w: &SymmetryCurrent) -> Result<f64> {
        poincare_invariant(&self.lagrangian, self.chart, s, w)
    }
}
