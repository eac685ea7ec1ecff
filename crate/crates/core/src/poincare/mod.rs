//! Poincaré and Lagrange–Poincaré equations on frame-equipped manifolds.

mod combined;
mod equations;
mod frame;
mod integrate;
mod lagrangian;

pub use combined::{
    combined_energy, combined_invariant, lagrange_poincare_rhs, lagrange_poincare_rk4_step, CombinedLagrangian,
    CombinedState, LagrangePoincareRhs, QuadraticCombined,
};
pub use equations::{poincare_energy, poincare_invariant, poincare_rhs, transport_residual, PoincareState, SymmetryCurrent};
pub use frame::{
    current_from_flow, finite_difference_structure, CoordinateChart, DVec, FrameChart, So3Chart, MAX_FRAME_CONDITION,
    TANGENT_TOL,
};
pub use integrate::PoincareSystem;
pub use lagrangian::{fd_gradient, fd_symmetric_jacobian, solve_symmetric, PoincareLagrangian, QuadraticLagrangian, FD_REL_STEP};
