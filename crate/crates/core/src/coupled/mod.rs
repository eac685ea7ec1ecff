//! The rotating extended charge coupled to its own Maxwell field and to a
//! static external potential.
//!
//! Particle-weighted integrals evaluate external potentials at `q + d`, with
//! `d` the minimum-image displacement `x − q`, so they stay smooth across the
//! periodic boundary. Field integrals use box-centred coordinates.

mod lagrangian;

pub use lagrangian::{CrossCheck, VARIATIONAL_MAX_N};

use crate::external::{symmetry_report_seeded, ExternalPotential, SymmetryReport, DEFAULT_SYMMETRY_SEED};
use crate::grid::{
    check_support, coulomb_init, divergence_residual, field_angular_momentum, field_energy, field_momentum,
    gauss_residual, maxwell_rhs, FieldState, GridSpec, ParticleStencil, Spectral, VectorField,
};
use crate::par::Execution;
use crate::rigid_body::{moment_of_inertia, rotation_step, ChargeProfile, Quadrature};
use crate::so3::{reorthonormalize, Rotation};
use crate::{Error, Result, Vec3};

/// Default Courant number `dt/dx`.
pub const DEFAULT_CFL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub q: Vec3,
    pub qdot: Vec3,
    pub r: Rotation,
    /// Spatial angular velocity.
    pub omega: Vec3,
}

impl ParticleState {
    pub fn new(q: Vec3, qdot: Vec3, omega: Vec3) -> Self {
        ParticleState {
            q,
            qdot,
            r: Rotation::identity(),
            omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub particle: ParticleState,
    pub fields: FieldState,
    pub t: f64,
}

/// Time derivative of the evolved variables (`R` is advanced separately).
#[derive(Debug, Clone)]
pub struct Derivative {
    pub fields: FieldState,
    pub q: Vec3,
    pub qdot: Vec3,
    pub omega: Vec3,
}

/// Energy, momentum, angular momentum and constraint residuals at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantRecord {
    pub t: f64,
    pub energy: f64,
    pub p: Vec3,
    pub m: Vec3,
    pub gauss_res: f64,
    pub div_b_res: f64,
    pub ortho_res: f64,
    /// False when the field angular momentum quadrature sees non-negligible
    /// fields at the box boundary.
    pub m_reliable: bool,
}

/// Grid, charge profile, inertia and external potential of one simulation.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    spectral: Spectral,
    pub profile: ChargeProfile,
    /// Scalar moment of inertia of the profile.
    pub inertia: f64,
    pub external: ExternalPotential,
    /// Subtract the spatial mean of `j`, i.e. let the neutralizing background
    /// co-move with the charge so the mean field stays zero.
    pub neutralize_current: bool,
}

impl CoupledSystem {
    pub fn new(grid: GridSpec, profile: ChargeProfile, external: ExternalPotential) -> Result<Self> {
        Self::with_spectral(Spectral::new(grid), profile, external)
    }

    pub fn with_spectral(spectral: Spectral, profile: ChargeProfile, external: ExternalPotential) -> Result<Self> {
        check_support(&profile, spectral.grid())?;
        let inertia = moment_of_inertia(&profile, &Quadrature::default())?;
        Ok(CoupledSystem {
            spectral,
            profile,
            inertia,
            external,
            neutralize_current: true,
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.spectral = Spectral::with_execution(*self.spectral.grid(), exec);
        self
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn grid(&self) -> &GridSpec {
        self.spectral.grid()
    }

    fn exec(&self) -> Execution {
        self.spectral.execution()
    }

    pub fn stencil(&self, q: &Vec3) -> Result<ParticleStencil> {
        ParticleStencil::new(&self.profile, q, self.grid())
    }

    pub fn symmetry(&self, seed: u64) -> SymmetryReport {
        symmetry_report_seeded(&self.external, seed)
    }

    pub fn default_symmetry(&self) -> SymmetryReport {
        self.symmetry(DEFAULT_SYMMETRY_SEED)
    }

    /// Largest stable-by-default step `CFL·dx`.
    pub fn cfl_step(&self, cfl: f64) -> f64 {
        cfl * self.grid().dx()
    }

    /// Coulomb field of the charge at `particle.q`.
    pub fn coulomb_state(&self, particle: ParticleState) -> Result<SystemState> {
        Ok(SystemState {
            fields: coulomb_init(&self.spectral, &self.profile, &particle.q)?,
            particle,
            t: 0.0,
        })
    }

    /// Sums `f(idx, ρ, d)·dx³` over the grid in a fixed order.
    pub(crate) fn particle_integral<const N: usize>(
        &self,
        st: &ParticleStencil,
        f: impl Fn(usize, f64, Vec3) -> [f64; N] + Sync + Send,
    ) -> [f64; N] {
        let g = self.grid();
        let n2 = g.n() * g.n();
        let mut total = self.exec().ordered_sum(g.n(), |z| {
            let mut acc = [0.0; N];
            for idx in z * n2..(z + 1) * n2 {
                let rho = st.density(idx);
                if rho == 0.0 {
                    continue;
                }
                for (a, v) in acc.iter_mut().zip(f(idx, rho, st.displacement(idx))) {
                    *a += v;
                }
            }
            acc
        });
        total.iter_mut().for_each(|v| *v *= g.cell_volume());
        total
    }

    /// Lorentz force and torque about `q`:
    /// `∫ [E + Eᵉˣᵗ + (q̇ + ω∧d)∧(B + Bᵉˣᵗ)] ρ dx` and `∫ d∧[…] ρ dx`.
    pub fn force_and_torque(&self, particle: &ParticleState, fields: &FieldState) -> Result<(Vec3, Vec3)> {
        let st = self.stencil(&particle.q)?;
        let ext = !self.external.is_zero();
        let s = self.particle_integral(&st, |idx, rho, d| {
            let mut e = fields.e.at(idx);
            let mut b = fields.b.at(idx);
            if ext {
                let x = particle.q + d;
                e += self.external.e(&x);
                b += self.external.b(&x);
            }
            let v = particle.qdot + particle.omega.cross(&d);
            let f = (e + v.cross(&b)) * rho;
            let t = d.cross(&f);
            [f.x, f.y, f.z, t.x, t.y, t.z]
        });
        Ok((Vec3::new(s[0], s[1], s[2]), Vec3::new(s[3], s[4], s[5])))
    }

    pub fn lorentz_force(&self, state: &SystemState) -> Result<Vec3> {
        Ok(self.force_and_torque(&state.particle, &state.fields)?.0)
    }

    pub fn lorentz_torque(&self, state: &SystemState) -> Result<Vec3> {
        Ok(self.force_and_torque(&state.particle, &state.fields)?.1)
    }

    /// Source current, with its spatial mean removed when
    /// [`neutralize_current`](Self::neutralize_current) is set.
    pub fn current(&self, particle: &ParticleState) -> Result<VectorField> {
        let st = self.stencil(&particle.q)?;
        let mut j = st.current_field(&particle.qdot, &particle.omega, self.exec());
        if self.neutralize_current {
            for c in j.0.iter_mut() {
                let mean = c.iter().sum::<f64>() / c.len() as f64;
                c.iter_mut().for_each(|v| *v -= mean);
            }
        }
        Ok(j)
    }

    /// Maxwell block with the particle current, `q̈` = force, `ω̇` = torque/I.
    pub fn coupled_rhs(&self, particle: &ParticleState, fields: &FieldState) -> Result<Derivative> {
        let j = self.current(particle)?;
        let (force, torque) = self.force_and_torque(particle, fields)?;
        Ok(Derivative {
            fields: maxwell_rhs(&self.spectral, fields, &j),
            q: particle.qdot,
            qdot: force,
            omega: torque / self.inertia,
        })
    }

    fn stage(base: &SystemState, k: &Derivative, h: f64) -> (ParticleState, FieldState) {
        let mut fields = base.fields.clone();
        fields.add_scaled(&k.fields, h);
        let p = &base.particle;
        let particle = ParticleState {
            q: p.q + k.q * h,
            qdot: p.qdot + k.qdot * h,
            r: p.r,
            omega: p.omega + k.omega * h,
        };
        (particle, fields)
    }

    /// Classical RK4 on `(E, B, q, q̇, ω)`. `R` is advanced by the exponential
    /// update with the RK4-weighted stage angular velocity and then
    /// re-orthonormalized.
    pub fn rk4_step(&self, s: &SystemState, dt: f64) -> Result<SystemState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(dt));
        }
        let k1 = self.coupled_rhs(&s.particle, &s.fields)?;
        let (p2, f2) = Self::stage(s, &k1, 0.5 * dt);
        let k2 = self.coupled_rhs(&p2, &f2)?;
        let (p3, f3) = Self::stage(s, &k2, 0.5 * dt);
        let k3 = self.coupled_rhs(&p3, &f3)?;
        let (p4, f4) = Self::stage(s, &k3, dt);
        let k4 = self.coupled_rhs(&p4, &f4)?;
        drop((f2, f3, f4));

        let mut fields = s.fields.clone();
        for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
            fields.add_scaled(&k.fields, w * dt / 6.0);
        }
        let avg = |f: fn(&Derivative) -> Vec3| (f(&k1) + f(&k2) * 2.0 + f(&k3) * 2.0 + f(&k4)) * (dt / 6.0);
        let p = &s.particle;
        let omega_avg = (p.omega + p2.omega * 2.0 + p3.omega * 2.0 + p4.omega) / 6.0;
        let (q, qdot, omega) = (p.q + avg(|k| k.q), p.qdot + avg(|k| k.qdot), p.omega + avg(|k| k.omega));
        let finite = [q, qdot, omega, omega_avg].iter().all(|v| v.iter().all(|x| x.is_finite()));
        if !finite || !fields.all_finite() {
            return Err(Error::NonFinite { last_good_t: s.t });
        }
        let particle = ParticleState {
            q,
            qdot,
            r: reorthonormalize(rotation_step(&p.r, &omega_avg, dt).matrix())?,
            omega,
        };
        if particle.qdot.norm() >= 1.0 {
            log::warn!("|q̇| = {} at t = {} exceeds the speed of light", particle.qdot.norm(), s.t + dt);
        }
        Ok(SystemState {
            particle,
            fields,
            t: s.t + dt,
        })
    }

    /// `½∫(|E|²+|B|²) + ½|q̇|² + ½Iω² + ∫A₀ᵉˣᵗ ρ`.
    pub fn energy_total(&self, s: &SystemState) -> Result<f64> {
        let p = &s.particle;
        let mut e = field_energy(self.grid(), &s.fields) + 0.5 * p.qdot.norm_squared() + 0.5 * self.inertia * p.omega.norm_squared();
        if !self.external.is_zero() {
            let st = self.stencil(&p.q)?;
            let [v] = self.particle_integral(&st, |_, rho, d| [self.external.a0(&(p.q + d)) * rho]);
            e += v;
        }
        Ok(e)
    }

    /// `q̇ + ∫E∧B + ∫Aᵉˣᵗ ρ`.
    pub fn momentum_total(&self, s: &SystemState) -> Result<Vec3> {
        let p = &s.particle;
        let mut m = p.qdot + field_momentum(self.grid(), &s.fields);
        if !self.external.is_zero() {
            let st = self.stencil(&p.q)?;
            let v = self.particle_integral(&st, |_, rho, d| (self.external.a(&(p.q + d)) * rho).into());
            m += Vec3::from(v);
        }
        Ok(m)
    }

    /// `q∧q̇ + Iω + ∫x∧(E∧B) + ∫x∧Aᵉˣᵗ ρ`, with the reliability flag of the
    /// field quadrature.
    pub fn angular_momentum_total(&self, s: &SystemState) -> Result<(Vec3, bool)> {
        let p = &s.particle;
        let field = field_angular_momentum(self.grid(), &s.fields);
        let mut m = p.q.cross(&p.qdot) + p.omega * self.inertia + field.value;
        if !self.external.is_zero() {
            let st = self.stencil(&p.q)?;
            let v = self.particle_integral(&st, |_, rho, d| {
                let x = p.q + d;
                (x.cross(&self.external.a(&x)) * rho).into()
            });
            m += Vec3::from(v);
        }
        Ok((m, field.reliable))
    }

    pub fn gauss_residual(&self, s: &SystemState) -> Result<f64> {
        gauss_residual(&self.spectral, &s.fields, &self.profile, &s.particle.q)
    }

    pub fn record(&self, s: &SystemState) -> Result<InvariantRecord> {
        let (m, m_reliable) = self.angular_momentum_total(s)?;
        Ok(InvariantRecord {
            t: s.t,
            energy: self.energy_total(s)?,
            p: self.momentum_total(s)?,
            m,
            gauss_res: self.gauss_residual(s)?,
            div_b_res: divergence_residual(&self.spectral, &s.fields.b),
            ortho_res: s.particle.r.orthogonality_residual(),
            m_reliable,
        })
    }
}
