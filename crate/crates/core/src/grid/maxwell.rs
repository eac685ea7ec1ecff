//! Maxwell evolution, Coulomb initial data, constraint residuals and
//! Coulomb-gauge potentials.

use super::sources::ParticleStencil;
use super::{FieldState, ScalarField, Spectral, VectorField};
use crate::rigid_body::ChargeProfile;
use crate::{Error, Result, Vec3};

/// Largest `|∇·B|` accepted by [`gauge_reconstruct`].
pub const SOLENOIDAL_TOL: f64 = 1e-8;

/// `Ė = ∇∧B − j`, `Ḃ = −∇∧E`.
pub fn maxwell_rhs(sp: &Spectral, fields: &FieldState, j: &VectorField) -> FieldState {
    let mut e = sp.curl(&fields.b);
    e.add_scaled(j, -1.0);
    let mut b = sp.curl(&fields.e);
    for c in b.0.iter_mut() {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    FieldState { e, b }
}

fn neutralized_density(sp: &Spectral, profile: &ChargeProfile, q: &Vec3) -> Result<ScalarField> {
    let mut rho = ParticleStencil::new(profile, q, sp.grid())?.density_field(sp.execution());
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    rho.iter_mut().for_each(|v| *v -= mean);
    Ok(rho)
}

/// Electrostatic field of the charge at `q` against a uniform neutralizing
/// background: `E = −∇φ`, `−Δφ = ρ − ρ̄`, `B = 0`.
pub fn coulomb_init(sp: &Spectral, profile: &ChargeProfile, q: &Vec3) -> Result<FieldState> {
    let rho = neutralized_density(sp, profile, q)?;
    let phi = sp.solve_poisson(&rho);
    let mut e = sp.grad(&phi);
    for c in e.0.iter_mut() {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(FieldState {
        e,
        b: VectorField::zeros(sp.grid()),
    })
}

/// `max |∇·E − (ρ(x − q) − ρ̄)|` with `ρ̄` the grid mean of the samples.
pub fn gauss_residual(sp: &Spectral, fields: &FieldState, profile: &ChargeProfile, q: &Vec3) -> Result<f64> {
    let rho = neutralized_density(sp, profile, q)?;
    let div = sp.div(&fields.e);
    Ok(div.iter().zip(&rho).map(|(d, r)| (d - r).abs()).fold(0.0, f64::max))
}

/// `max |∇·F|`.
pub fn divergence_residual(sp: &Spectral, f: &VectorField) -> f64 {
    sp.div(f).iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Potentials with `B = ∇∧A`, `E = −∇A₀ − Ȧ`, `∇·A = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFields {
    pub a0: ScalarField,
    pub a: VectorField,
    pub a_dot: VectorField,
}

/// Coulomb-gauge inversion: `A` from `∇∧A = B`, `A₀` from `−ΔA₀ = ∇·E`,
/// `Ȧ = −E − ∇A₀`. The spatial mean of `B` is not representable and must
/// vanish.
pub fn gauge_reconstruct(sp: &Spectral, fields: &FieldState) -> Result<GaugeFields> {
    let div_b = divergence_residual(sp, &fields.b);
    if div_b > SOLENOIDAL_TOL {
        return Err(Error::NonSolenoidal(div_b));
    }
    let a = sp.inverse_curl(&fields.b);
    let a0 = sp.solve_poisson(&sp.div(&fields.e));
    let grad_a0 = sp.grad(&a0);
    let mut a_dot = fields.e.clone();
    a_dot.add_scaled(&grad_a0, 1.0);
    for c in a_dot.0.iter_mut() {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(GaugeFields { a0, a, a_dot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn setup(n: usize) -> (Spectral, ChargeProfile) {
        (Spectral::new(GridSpec::new(n, 16.0).unwrap()), ChargeProfile::gaussian(1.0).unwrap())
    }

    #[test]
    fn coulomb_state_satisfies_gauss_and_is_curl_free() {
        let (sp, p) = setup(32);
        let q = Vec3::new(0.3, -0.2, 0.1);
        let f = coulomb_init(&sp, &p, &q).unwrap();
        assert!(gauss_residual(&sp, &f, &p, &q).unwrap() < 1e-10);
        assert!(sp.curl(&f.e).max_abs() < 1e-10);
        assert_eq!(f.b.max_abs(), 0.0);
    }

    #[test]
    fn coulomb_field_matches_enclosed_charge() {
        // |E(r)| = Q(r)/(4πr²) with Q(r) the Gaussian charge inside radius r
        let (sp, p) = setup(48);
        let f = coulomb_init(&sp, &p, &Vec3::zeros()).unwrap();
        let g = sp.grid();
        let idx = g.flatten(24 + 9, 24, 24); // r = 3σ on the x axis
        let r: f64 = 3.0;
        let enclosed = erf(r / 2f64.sqrt()) - (2.0 / PI).sqrt() * r * (-r * r / 2.0).exp();
        let expected = enclosed / (4.0 * PI * r * r);
        let got = f.e.at(idx).norm();
        assert!((got - expected).abs() < 0.05 * expected, "{got} vs {expected}");
    }

    /// Maclaurin series of erf.
    fn erf(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..60 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn maxwell_rhs_examples() {
        let (sp, _) = setup(16);
        let g = *sp.grid();
        let j = super::super::current_density(&ChargeProfile::gaussian(0.5).unwrap(), &Vec3::zeros(), &Vec3::x(), &Vec3::z(), &g).unwrap();
        let d = maxwell_rhs(&sp, &FieldState::zeros(&g), &j);
        assert!(d.e.max_abs_diff(&VectorField(j.0.clone().map(|c| c.iter().map(|v| -v).collect()))) < 1e-18);
        assert_eq!(d.b.max_abs(), 0.0);

        let k = 2.0 * PI / 16.0 * 2.0;
        let b = VectorField::from_fn(&g, |x| [0.0, (k * x[0]).sin(), 0.0]);
        let fields = FieldState { e: VectorField::zeros(&g), b };
        let d = maxwell_rhs(&sp, &fields, &VectorField::zeros(&g));
        let expect = VectorField::from_fn(&g, |x| [0.0, 0.0, k * (k * x[0]).cos()]);
        assert!(d.e.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn gauss_residual_without_field_is_density() {
        let (sp, _) = setup(16);
        let p = ChargeProfile::gaussian(0.7).unwrap();
        let q = Vec3::new(1.0, 2.0, -0.5);
        let rho = super::super::sample_density(&p, &q, sp.grid()).unwrap();
        let mean = rho.iter().sum::<f64>() / rho.len() as f64;
        let expected = rho.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
        let r = gauss_residual(&sp, &FieldState::zeros(sp.grid()), &p, &q).unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn gauge_round_trip() {
        let (sp, _) = setup(16);
        let g = *sp.grid();
        let w = 2.0 * PI / 16.0;
        let a0 = VectorField::from_fn(&g, |x| [(w * x[0]).sin() * (w * x[1]).cos(), 0.0, 0.0]).0[0].clone();
        let raw = VectorField::from_fn(&g, |x| [(w * x[2]).cos(), (2.0 * w * x[0]).sin(), (w * (x[0] + x[1])).cos()]);
        // solenoidal projection of the raw field
        let a = sp.inverse_curl(&sp.curl(&raw));
        let a_dot = VectorField::from_fn(&g, |x| [(w * x[1]).sin(), 0.0, (w * x[2]).cos()]);
        let a_dot = sp.inverse_curl(&sp.curl(&a_dot));
        let mut e = sp.grad(&a0);
        e.add_scaled(&a_dot, 1.0);
        e.0.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v = -*v));
        let fields = FieldState { e, b: sp.curl(&a) };
        let gf = gauge_reconstruct(&sp, &fields).unwrap();
        assert!(gf.a.max_abs_diff(&a) < 1e-8);
        assert!(gf.a_dot.max_abs_diff(&a_dot) < 1e-8);
        let a0_err = gf.a0.iter().zip(&a0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(a0_err < 1e-8);
        assert!(sp.curl(&gf.a).max_abs_diff(&fields.b) < 1e-8);

        let zero = gauge_reconstruct(&sp, &FieldState::zeros(&g)).unwrap();
        assert_eq!(zero.a.max_abs() + zero.a_dot.max_abs(), 0.0);
    }

    #[test]
    fn longitudinal_field_has_no_vector_potential() {
        let (sp, p) = setup(32);
        let f = coulomb_init(&sp, &p, &Vec3::new(0.5, 0.0, 0.0)).unwrap();
        let gf = gauge_reconstruct(&sp, &f).unwrap();
        assert_eq!(gf.a.max_abs(), 0.0);
        assert!(gf.a_dot.max_abs() < 1e-12);
    }

    #[test]
    fn non_solenoidal_b_is_rejected() {
        let (sp, _) = setup(16);
        let g = *sp.grid();
        let w = 2.0 * PI / 16.0;
        let b = VectorField::from_fn(&g, |x| [(w * x[0]).sin(), 0.0, 0.0]);
        let f = FieldState { e: VectorField::zeros(&g), b };
        assert!(matches!(gauge_reconstruct(&sp, &f), Err(Error::NonSolenoidal(_))));
    }
}
