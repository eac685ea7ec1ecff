//! Time-independent external potentials `(A₀ᵉˣᵗ, Aᵉˣᵗ)`, their fields and
//! the symmetries that decide which invariants are conserved.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::so3::{so3_exp, Rotation};
use crate::Vec3;

pub type ScalarPotential = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;
pub type VectorPotential = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;

#[derive(Clone)]
pub enum ExternalPotential {
    Zero,
    /// `A₀ = −E₀·x`, `A = 0`.
    UniformE(Vec3),
    /// `A₀ = 0`, `A = ½ B₀∧x`.
    UniformB(Vec3),
    /// User potentials; fields by central differences.
    Custom { a0: ScalarPotential, a: VectorPotential },
}

impl fmt::Debug for ExternalPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExternalPotential::Zero => write!(f, "Zero"),
            ExternalPotential::UniformE(e) => write!(f, "UniformE({}, {}, {})", e.x, e.y, e.z),
            ExternalPotential::UniformB(b) => write!(f, "UniformB({}, {}, {})", b.x, b.y, b.z),
            ExternalPotential::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// Potentials and fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalValue {
    pub a0: f64,
    pub a: Vec3,
    pub e: Vec3,
    pub b: Vec3,
}

const CUSTOM_FD_STEP: f64 = 1e-5;

impl ExternalPotential {
    pub fn custom(
        a0: impl Fn(&Vec3) -> f64 + Send + Sync + 'static,
        a: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        ExternalPotential::Custom {
            a0: Arc::new(a0),
            a: Arc::new(a),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExternalPotential::Zero)
    }

    pub fn a0(&self, x: &Vec3) -> f64 {
        match self {
            ExternalPotential::Zero | ExternalPotential::UniformB(_) => 0.0,
            ExternalPotential::UniformE(e0) => -e0.dot(x),
            ExternalPotential::Custom { a0, .. } => a0(x),
        }
    }

    pub fn a(&self, x: &Vec3) -> Vec3 {
        match self {
            ExternalPotential::Zero | ExternalPotential::UniformE(_) => Vec3::zeros(),
            ExternalPotential::UniformB(b0) => 0.5 * b0.cross(x),
            ExternalPotential::Custom { a, .. } => a(x),
        }
    }

    /// `Eᵉˣᵗ = −∇A₀` (the potentials are static).
    pub fn e(&self, x: &Vec3) -> Vec3 {
        match self {
            ExternalPotential::Zero | ExternalPotential::UniformB(_) => Vec3::zeros(),
            ExternalPotential::UniformE(e0) => *e0,
            ExternalPotential::Custom { a0, .. } => {
                let h = CUSTOM_FD_STEP;
                -Vec3::from_fn(|k, _| {
                    let d = Vec3::ith(k, h);
                    (a0(&(x + d)) - a0(&(x - d))) / (2.0 * h)
                })
            }
        }
    }

    /// `Bᵉˣᵗ = ∇∧A`.
    pub fn b(&self, x: &Vec3) -> Vec3 {
        match self {
            ExternalPotential::Zero | ExternalPotential::UniformE(_) => Vec3::zeros(),
            ExternalPotential::UniformB(b0) => *b0,
            ExternalPotential::Custom { a, .. } => {
                let h = CUSTOM_FD_STEP;
                let d = |k: usize| (a(&(x + Vec3::ith(k, h))) - a(&(x - Vec3::ith(k, h)))) / (2.0 * h);
                let (dx, dy, dz) = (d(0), d(1), d(2));
                Vec3::new(dy.z - dz.y, dz.x - dx.z, dx.y - dy.x)
            }
        }
    }
}

pub fn eval_external(pot: &ExternalPotential, x: &Vec3) -> ExternalValue {
    ExternalValue {
        a0: pot.a0(x),
        a: pot.a(x),
        e: pot.e(x),
        b: pot.b(x),
    }
}

/// Which invariants the potential leaves conserved. Axis sets are indexed
/// 0..3 for `e₁, e₂, e₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryReport {
    /// `P_k`: the potentials do not depend on `x_k`.
    pub conserved_p: [bool; 3],
    /// `M_k`: `A₀(U x) = A₀(x)` and `A(U x) = U A(x)` for rotations `U`
    /// about `e_k`.
    pub conserved_m: [bool; 3],
    /// The potentials do not depend on time.
    pub energy_conserved: bool,
}

impl SymmetryReport {
    pub fn full() -> Self {
        SymmetryReport {
            conserved_p: [true; 3],
            conserved_m: [true; 3],
            energy_conserved: true,
        }
    }
}

/// Seed used by [`symmetry_report`] for sampled classification.
pub const DEFAULT_SYMMETRY_SEED: u64 = 0x5eed;
/// Number of random points at which custom identities are sampled.
pub const SYMMETRY_SAMPLES: usize = 64;
/// Tolerance on sampled identities.
pub const SYMMETRY_TOL: f64 = 1e-8;

fn parallel_to_axis(v: &Vec3, k: usize) -> bool {
    (0..3).all(|j| j == k || v[j] == 0.0)
}

pub fn symmetry_report(pot: &ExternalPotential) -> SymmetryReport {
    symmetry_report_seeded(pot, DEFAULT_SYMMETRY_SEED)
}

/// Built-ins are classified analytically. Custom potentials are sampled at
/// [`SYMMETRY_SAMPLES`] points in `[−4, 4]³`: this corroborates but cannot
/// prove the symmetry.
pub fn symmetry_report_seeded(pot: &ExternalPotential, seed: u64) -> SymmetryReport {
    match pot {
        ExternalPotential::Zero => SymmetryReport::full(),
        ExternalPotential::UniformE(e0) => SymmetryReport {
            conserved_p: std::array::from_fn(|k| e0[k] == 0.0),
            conserved_m: std::array::from_fn(|k| parallel_to_axis(e0, k)),
            energy_conserved: true,
        },
        ExternalPotential::UniformB(b0) => SymmetryReport {
            conserved_p: std::array::from_fn(|k| parallel_to_axis(b0, k)),
            conserved_m: std::array::from_fn(|k| parallel_to_axis(b0, k)),
            energy_conserved: true,
        },
        ExternalPotential::Custom { .. } => sampled_report(pot, seed),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SYMMETRY_TOL * (1.0 + a.abs().max(b.abs()))
}

fn close3(a: &Vec3, b: &Vec3) -> bool {
    (0..3).all(|i| close(a[i], b[i]))
}

fn sampled_report(pot: &ExternalPotential, seed: u64) -> SymmetryReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec3> = (0..SYMMETRY_SAMPLES)
        .map(|_| Vec3::from_fn(|_, _| rng.random_range(-4.0..4.0)))
        .collect();
    let shifts = [0.37, -1.3, 2.9];
    let angles = [0.7, -2.1, 3.0];
    let translation = |k: usize| {
        points.iter().all(|x| {
            shifts.iter().all(|&s| {
                let y = x + Vec3::ith(k, s);
                close(pot.a0(&y), pot.a0(x)) && close3(&pot.a(&y), &pot.a(x))
            })
        })
    };
    let rotation = |k: usize| {
        points.iter().all(|x| {
            angles.iter().all(|&t| {
                let u: Rotation = so3_exp(&Vec3::ith(k, t));
                let y = u.apply(x);
                close(pot.a0(&y), pot.a0(x)) && close3(&pot.a(&y), &u.apply(&pot.a(x)))
            })
        })
    };
    SymmetryReport {
        conserved_p: std::array::from_fn(translation),
        conserved_m: std::array::from_fn(rotation),
        energy_conserved: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let v = eval_external(&ExternalPotential::UniformB(Vec3::z()), &Vec3::x());
        assert_eq!(v.a, Vec3::new(0.0, 0.5, 0.0));
        assert_eq!(v.b, Vec3::z());
        assert_eq!(v.e, Vec3::zeros());
        let e0 = Vec3::new(0.3, -1.0, 2.0);
        let v = eval_external(&ExternalPotential::UniformE(e0), &Vec3::new(5.0, 1.0, -2.0));
        assert_eq!((v.e, v.b), (e0, Vec3::zeros()));
        let v = eval_external(&ExternalPotential::Zero, &Vec3::new(1.0, 2.0, 3.0));
        assert_eq!((v.a0, v.a, v.e, v.b), (0.0, Vec3::zeros(), Vec3::zeros(), Vec3::zeros()));
    }

    #[test]
    fn analytic_fields_match_potential_differences() {
        let pots = [
            ExternalPotential::UniformE(Vec3::new(0.3, -1.0, 2.0)),
            ExternalPotential::UniformB(Vec3::new(-0.5, 0.2, 1.5)),
            ExternalPotential::Zero,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for pot in &pots {
            for _ in 0..100 {
                let x = Vec3::from_fn(|_, _| rng.random_range(-5.0..5.0));
                let custom = ExternalPotential::custom(
                    {
                        let p = pot.clone();
                        move |y| p.a0(y)
                    },
                    {
                        let p = pot.clone();
                        move |y| p.a(y)
                    },
                );
                assert!((custom.e(&x) - pot.e(&x)).norm() < 1e-8);
                assert!((custom.b(&x) - pot.b(&x)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn report_examples() {
        assert_eq!(symmetry_report(&ExternalPotential::Zero), SymmetryReport::full());
        let r = symmetry_report(&ExternalPotential::UniformB(Vec3::new(0.0, 0.0, 0.5)));
        assert_eq!(r.conserved_p, [false, false, true]);
        assert_eq!(r.conserved_m, [false, false, true]);
        assert!(r.energy_conserved);
        let r = symmetry_report(&ExternalPotential::UniformE(Vec3::new(2.0, 0.0, 0.0)));
        assert_eq!(r.conserved_p, [false, true, true]);
        assert_eq!(r.conserved_m, [true, false, false]);
    }

    #[test]
    fn sampled_classification_agrees_with_analytic() {
        let cases = [
            Vec3::new(0.0, 0.0, 0.5),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.3, -0.2, 0.0),
            Vec3::zeros(),
        ];
        for v in cases {
            for pot in [ExternalPotential::UniformB(v), ExternalPotential::UniformE(v)] {
                let p = pot.clone();
                let q = pot.clone();
                let custom = ExternalPotential::custom(move |x| p.a0(x), move |x| q.a(x));
                assert_eq!(symmetry_report(&custom), symmetry_report(&pot), "{pot:?}");
            }
        }
        // an off-origin axial potential is not classified as symmetric
        let shifted = ExternalPotential::custom(|_| 0.0, |x| 0.5 * Vec3::z().cross(&(x - Vec3::new(1.0, 0.0, 0.0))));
        let r = symmetry_report(&shifted);
        assert_eq!(r.conserved_m, [false, false, false]);
        assert_eq!(r.conserved_p, [false, false, true]);
    }
}
