//! Lagrangian of the coupled system evaluated from Coulomb-gauge potentials,
//! and the check that its Poincaré equation for `ω` reproduces the Lorentz
//! torque.

use super::{CoupledSystem, ParticleState, SystemState};
use crate::grid::{field_energy, gauge_reconstruct, FieldState, GaugeFields};
use crate::so3::so3_structure_constants;
use crate::{Error, Result, Vec3};

/// Largest grid size accepted by [`CoupledSystem::variational_crosscheck`].
pub const VARIATIONAL_MAX_N: usize = 32;

/// `L̂` is quadratic in `ω`, so a central difference is exact up to round-off
/// and a large step keeps round-off small.
const OMEGA_FD_STEP: f64 = 1e-2;

/// Both sides of the angular Poincaré equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    /// `L̂_ω − Iω`: the field part of the angular momentum conjugate to `ω`.
    pub s: Vec3,
    /// `Σ c ω L̂_ω − d/dt S`, which must equal `Iω̇`.
    pub predicted: Vec3,
    /// Lorentz torque quadrature.
    pub torque: Vec3,
    /// `max_k |predicted_k − torque_k|`.
    pub discrepancy: f64,
}

impl CoupledSystem {
    /// `½∫(|E|²−|B|²) + ½|q̇|² + ½Iω² − ∫(A₀ + A₀ᵉˣᵗ)ρ + ∫(q̇ + ω∧d)·(A + Aᵉˣᵗ)ρ`
    /// with `E = −∇A₀ − Ȧ` and `B = ∇∧A`.
    pub fn lagrangian_from_potentials(&self, gauge: &GaugeFields, p: &ParticleState) -> Result<f64> {
        let sp = self.spectral();
        let mut e = sp.grad(&gauge.a0);
        e.add_scaled(&gauge.a_dot, 1.0);
        let b = sp.curl(&gauge.a);
        let g = self.grid();
        let fields = FieldState { e, b: crate::grid::VectorField::zeros(g) };
        let electric = field_energy(g, &fields);
        let magnetic = field_energy(g, &FieldState { e: b, b: fields.b });
        let st = self.stencil(&p.q)?;
        let ext = !self.external.is_zero();
        let [coupling] = self.particle_integral(&st, |idx, rho, d| {
            let (mut a0, mut a) = (gauge.a0[idx], gauge.a.at(idx));
            if ext {
                let x = p.q + d;
                a0 += self.external.a0(&x);
                a += self.external.a(&x);
            }
            [((p.qdot + p.omega.cross(&d)).dot(&a) - a0) * rho]
        });
        Ok(electric - magnetic + 0.5 * p.qdot.norm_squared() + 0.5 * self.inertia * p.omega.norm_squared() + coupling)
    }

    pub fn lagrangian_value(&self, s: &SystemState) -> Result<f64> {
        let gauge = gauge_reconstruct(self.spectral(), &s.fields)?;
        self.lagrangian_from_potentials(&gauge, &s.particle)
    }

    /// `L̂_ω` by central differences in `ω` at fixed potentials.
    pub fn omega_momentum(&self, gauge: &GaugeFields, p: &ParticleState) -> Result<Vec3> {
        let h = OMEGA_FD_STEP;
        let mut out = Vec3::zeros();
        for k in 0..3 {
            let shifted = |sign: f64| ParticleState {
                omega: p.omega + Vec3::ith(k, sign * h),
                ..*p
            };
            out[k] = (self.lagrangian_from_potentials(gauge, &shifted(1.0))?
                - self.lagrangian_from_potentials(gauge, &shifted(-1.0))?)
                / (2.0 * h);
        }
        Ok(out)
    }

    /// Evaluates `d/dt L̂_ω_k = Σ c^j_ik ω_i L̂_ω_j` (the frame derivative of
    /// `L̂` vanishes) with `Iω̇` eliminated, and compares the result with the
    /// Lorentz torque. `d/dt(L̂_ω − Iω)` is evaluated analytically from the
    /// Maxwell evolution `Ȧ = −E − ∇A₀` and the translation of `ρ`.
    pub fn variational_crosscheck(&self, s: &SystemState) -> Result<CrossCheck> {
        let n = self.grid().n();
        if n > VARIATIONAL_MAX_N {
            return Err(Error::InvalidGrid(format!(
                "variational cross-check needs n <= {VARIATIONAL_MAX_N}, got {n}"
            )));
        }
        let p = &s.particle;
        let gauge = gauge_reconstruct(self.spectral(), &s.fields)?;
        let l_omega = self.omega_momentum(&gauge, p)?;
        let field_part = l_omega - p.omega * self.inertia;

        let st = self.stencil(&p.q)?;
        let inv_s2 = 1.0 / (self.profile.sigma * self.profile.sigma);
        let ext = !self.external.is_zero();
        let s_dot = Vec3::from(self.particle_integral(&st, |idx, rho, d| {
            let mut a = gauge.a.at(idx);
            if ext {
                a += self.external.a(&(p.q + d));
            }
            let rho_dot = p.qdot.dot(&d) * inv_s2 * rho;
            let v = -p.qdot.cross(&a) * rho + d.cross(&gauge.a_dot.at(idx)) * rho + d.cross(&a) * rho_dot;
            v.into()
        }));

        let c = so3_structure_constants();
        let bracket = Vec3::from_fn(|k, _| {
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += c.get(j, i, k) * p.omega[i] * l_omega[j];
                }
            }
            acc
        });
        let predicted = bracket - s_dot;
        let torque = self.lorentz_torque(s)?;
        Ok(CrossCheck {
            s: field_part,
            predicted,
            torque,
            discrepancy: (predicted - torque).amax(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::external::ExternalPotential;
    use crate::grid::{GridSpec, VectorField};
    use crate::poincare::{current_from_flow, So3Chart};
    use crate::rigid_body::ChargeProfile;
    use crate::so3::{so3_exp, Rotation};

    fn system(n: usize, ext: ExternalPotential) -> CoupledSystem {
        CoupledSystem::new(GridSpec::new(n, 16.0).unwrap(), ChargeProfile::gaussian(1.0).unwrap(), ext).unwrap()
    }

    fn evolved(sys: &CoupledSystem, steps: usize) -> SystemState {
        let p = ParticleState::new(Vec3::new(0.3, -0.2, 0.1), Vec3::new(0.1, 0.05, -0.02), Vec3::new(0.4, -0.3, 1.0));
        let mut s = sys.coulomb_state(p).unwrap();
        for _ in 0..steps {
            s = sys.rk4_step(&s, 0.25).unwrap();
        }
        s
    }

    #[test]
    fn kinetic_terms_only() {
        let sys = system(16, ExternalPotential::Zero);
        let p = ParticleState::new(Vec3::zeros(), Vec3::new(0.3, 0.1, 0.0), Vec3::new(0.0, 1.0, 2.0));
        let s = SystemState {
            particle: p,
            fields: FieldState::zeros(sys.grid()),
            t: 0.0,
        };
        let expected = 0.5 * 0.1 + 0.5 * sys.inertia * 5.0;
        assert!((sys.lagrangian_value(&s).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn uniform_e_shifts_lagrangian_by_e_dot_q() {
        let e0 = Vec3::new(0.2, -0.5, 0.3);
        let q = Vec3::new(1.0, 0.5, -0.7);
        let base = system(32, ExternalPotential::Zero);
        let with_e = system(32, ExternalPotential::UniformE(e0));
        let s = base.coulomb_state(ParticleState::new(q, Vec3::new(0.1, 0.0, 0.0), Vec3::z())).unwrap();
        let shift = with_e.lagrangian_value(&s).unwrap() - base.lagrangian_value(&s).unwrap();
        assert!((shift - e0.dot(&q)).abs() < 1e-10, "{shift}");
    }

    /// `F'(x) = U F(U⁻¹x)` for the quarter turn about `e₃`, exact on the grid.
    fn quarter_turn(g: &GridSpec, f: &VectorField) -> VectorField {
        let n = g.n();
        let u = so3_exp(&Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
        let mut out = VectorField::zeros(g);
        for idx in 0..g.len() {
            let (i, j, l) = g.unflatten(idx);
            let v = u.apply(&f.at(g.flatten(j, (n - i) % n, l)));
            for c in 0..3 {
                out.0[c][idx] = v[c];
            }
        }
        out
    }

    #[test]
    fn axial_rotation_leaves_lagrangian_invariant() {
        let sys = system(16, ExternalPotential::UniformB(Vec3::new(0.0, 0.0, 0.5)));
        let s = evolved(&sys, 3);
        let u = so3_exp(&Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
        let p = &s.particle;
        let rotated = SystemState {
            particle: ParticleState {
                q: u.apply(&p.q),
                qdot: u.apply(&p.qdot),
                r: u.compose(&p.r),
                omega: u.apply(&p.omega),
            },
            fields: FieldState {
                e: quarter_turn(sys.grid(), &s.fields.e),
                b: quarter_turn(sys.grid(), &s.fields.b),
            },
            t: s.t,
        };
        let l0 = sys.lagrangian_value(&s).unwrap();
        let l1 = sys.lagrangian_value(&rotated).unwrap();
        assert!((l1 - l0).abs() < 1e-6, "{l0} {l1}");
        assert!(s.fields.b.max_abs() > 1e-4);
    }

    #[test]
    fn crosscheck_zero_fields() {
        let sys = system(16, ExternalPotential::Zero);
        let s = SystemState {
            particle: ParticleState::new(Vec3::zeros(), Vec3::zeros(), Vec3::new(0.3, 0.2, 1.0)),
            fields: FieldState::zeros(sys.grid()),
            t: 0.0,
        };
        let c = sys.variational_crosscheck(&s).unwrap();
        assert!(c.predicted.norm() < 1e-12 && c.torque.norm() < 1e-12);
        assert!(c.discrepancy < 1e-12);
        assert!(matches!(system(48, ExternalPotential::Zero).variational_crosscheck(&s), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn crosscheck_converges_with_resolution() {
        let ext = ExternalPotential::UniformB(Vec3::new(0.1, 0.0, 0.5));
        let coarse = system(16, ext.clone());
        let fine = system(32, ext);
        let c16 = coarse.variational_crosscheck(&evolved(&coarse, 4)).unwrap();
        let c32 = fine.variational_crosscheck(&evolved(&fine, 4)).unwrap();
        assert!(c32.torque.norm() > 1e-3);
        assert!(c32.discrepancy < 1e-4, "{c32:?}");
        assert!(c32.discrepancy < c16.discrepancy, "{} {}", c32.discrepancy, c16.discrepancy);
    }

    /// Noether current of the axial rotation about `e₁` evaluated from the
    /// Lagrangian (velocity derivatives paired with the infinitesimal
    /// generator) agrees with the closed-form angular momentum.
    #[test]
    fn abstract_noether_current_matches_closed_form() {
        let sys = system(32, ExternalPotential::Zero);
        let g = *sys.grid();
        let sp = sys.spectral();
        let bump = |x: [f64; 3], c: [f64; 3], w: f64| {
            let r2: f64 = (0..3).map(|k| (x[k] - c[k]).powi(2)).sum();
            (-r2 / (2.0 * w * w)).exp()
        };
        // A = ∇∧ψ is localized and divergence-free; ψ has zero mean
        let psi_a = VectorField::from_fn(&g, |x| {
            let b = bump(x, [0.5, -0.3, 0.2], 1.2);
            [0.3 * (x[1] + 0.3) * b, -0.2 * (x[2] - 0.2) * b, 0.4 * (x[0] - 0.5) * b]
        });
        let psi_v = VectorField::from_fn(&g, |x| {
            let b = bump(x, [-0.4, 0.2, 0.1], 1.0);
            [0.2 * (x[2] - 0.1) * b, 0.3 * (x[0] + 0.4) * b, -0.1 * (x[1] - 0.2) * b]
        });
        let a = sp.curl(&psi_a);
        let a_dot = sp.curl(&psi_v);
        let p = ParticleState::new(Vec3::new(0.2, -0.1, 0.3), Vec3::new(0.05, 0.1, -0.08), Vec3::new(0.3, -0.5, 0.7));
        let coulomb = sys.coulomb_state(p).unwrap();
        let a0 = gauge_reconstruct(sp, &coulomb.fields).unwrap().a0;
        let gauge = GaugeFields { a0, a, a_dot };

        // closed form from E = −∇A₀ − Ȧ, B = ∇∧A
        let mut e = sp.grad(&gauge.a0);
        e.add_scaled(&gauge.a_dot, 1.0);
        e.0.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v = -*v));
        let state = SystemState {
            particle: p,
            fields: FieldState { e, b: sp.curl(&gauge.a) },
            t: 0.0,
        };
        let (m, _) = sys.angular_momentum_total(&state).unwrap();

        // generator of A ↦ U A(U⁻¹x) and q ↦ U q for U = exp(s ê₁)
        let axis = Vec3::x();
        let grads: Vec<VectorField> = (0..3).map(|c| sp.grad(&gauge.a.0[c])).collect();
        let mut xi = VectorField::zeros(&g);
        for idx in 0..g.len() {
            let x = Vec3::from(g.point(idx));
            let flow = axis.cross(&x);
            let v = axis.cross(&gauge.a.at(idx)) - Vec3::from_fn(|c, _| grads[c].at(idx).dot(&flow));
            for c in 0..3 {
                xi.0[c][idx] = v[c];
            }
        }
        let xi_q = axis.cross(&p.q);
        let h = 1e-2;
        let shifted = |sign: f64| {
            let mut gf = gauge.clone();
            gf.a_dot.add_scaled(&xi, sign * h);
            let particle = ParticleState {
                qdot: p.qdot + xi_q * (sign * h),
                ..p
            };
            sys.lagrangian_from_potentials(&gf, &particle).unwrap()
        };
        let velocity_part = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
        let so3 = So3Chart;
        let r = Rotation::identity();
        let tangent = So3Chart::to_ambient(&(crate::so3::hat(&axis) * r.matrix()));
        let w = current_from_flow(&so3, &So3Chart::to_ambient(r.matrix()), &tangent).unwrap();
        let l_omega = sys.omega_momentum(&gauge, &p).unwrap();
        let noether = velocity_part + (0..3).map(|k| l_omega[k] * w[k]).sum::<f64>();

        assert!(state.fields.b.max_abs() > 1e-2);
        assert!((noether - m.x).abs() < 1e-8, "{noether} vs {}", m.x);
    }
}
