//! Poincaré and Lagrange–Poincaré equations on frame-equipped manifolds,
//! their SO(3) specialization for rigid rotation, and a pseudo-spectral
//! Maxwell–Lorentz solver for a rotating extended charge.
//!
//! The crate is organised bottom-up:
//!
//! * [`so3`]: hat/vee maps, exponential map, right-invariant frame.
//! * [`poincare`]: abstract frames, Poincaré right-hand sides, energy and
//!   symmetry invariants, the transport relation for two-parameter families.
//! * [`rigid_body`]: moment of inertia of a radial profile and the vector
//!   form `d/dt ∂L/∂ω = ω ∧ ∂L/∂ω`.
//! * [`grid`]: periodic spectral fields, sources, Coulomb initial data,
//!   gauge reconstruction and field quadratures.
//! * [`external`]: analytic external potentials and their symmetries.
//! * [`coupled`]: the coupled field/particle system, its invariants and RK4.
//! * [`sim`]: configuration, scenarios and CSV/summary output.

pub mod coupled;
pub mod error;
pub mod external;
pub mod grid;
pub mod par;
pub mod poincare;
pub mod rigid_body;
pub mod sim;
pub mod so3;

pub use error::{Error, Result};
pub use nalgebra::{Matrix3, Vector3};

/// Three-vector of reals.
pub type Vec3 = Vector3<f64>;
/// 3×3 real matrix.
pub type Mat3 = Matrix3<f64>;
