//! so(3) ↔ ℝ³ and the right-invariant frame on SO(3).
//!
//! Angular velocities are *spatial*: `ω = vee(Ṙ Rᵀ)`, and the frame fields are
//! `v_k(R) = hat(e_k) R`. With this convention the frame commutators are
//! `[v_1, v_2] = -v_3` (and cyclic), i.e. `c^k_ij = -ε_ijk`.

use crate::{Error, Mat3, Result, Vec3};

/// Absolute Frobenius tolerance on the symmetric part accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-9;
/// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|` for a valid [`Rotation`].
pub const ROTATION_TOL: f64 = 1e-9;
const SERIES_THRESHOLD: f64 = 1e-6;

/// Skew-symmetric matrix with `hat(v) u = v ∧ u`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]. The input is antisymmetrized before extraction.
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let sym = ((m + m.transpose()) * 0.5).norm();
    if sym > SKEW_TOL {
        return Err(Error::NotSkew(sym));
    }
    let a = (m - m.transpose()) * 0.5;
    Ok(Vec3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)]))
}

/// A proper orthogonal 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Validates orthogonality and orientation.
    pub fn new(m: Mat3) -> Result<Self> {
        let ortho = orthogonality_residual(&m);
        let det = m.determinant();
        if ortho > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::NotRotation { ortho, det });
        }
        Ok(Rotation(m))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0 * other.0)
    }

    /// `‖RᵀR − I‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.0)
    }
}

fn orthogonality_residual(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).norm()
}

/// Exponential map so(3) → SO(3) (Rodrigues), with a series branch for small
/// angles.
pub fn so3_exp(v: &Vec3) -> Rotation {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < SERIES_THRESHOLD {
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        {
        let half = (0.5 * theta).sin();
        (theta.sin() / theta, 2.0 * half * half / theta2)
    }
    };
    let k = hat(v);
    Rotation(Mat3::identity() + k * a + k * k * b)
}

/// Frame field `v_k(R) = hat(e_k) R`; `axis` is 0-based.
pub fn right_field(axis: usize, r: &Rotation) -> Result<Mat3> {
    Ok(basis_hat(axis)? * r.0)
}

/// `hat(e_axis)`.
pub fn basis_hat(axis: usize) -> Result<Mat3> {
    if axis > 2 {
        return Err(Error::InvalidAxis(axis));
    }
    Ok(hat(&Vec3::ith(axis, 1.0)))
}

/// Spatial angular velocity `ω = vee(Ṙ Rᵀ)`.
pub fn omega_from_rotation_rate(r: &Rotation, rdot: &Mat3) -> Result<Vec3> {
    vee(&(rdot * r.0.transpose()))
}

/// Structure constants `c^k_ij` of a frame, `[v_i, v_j] = Σ_k c^k_ij v_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(n: usize) -> Self {
        StructureConstants {
            n,
            c: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `c^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[(k * self.n + i) * self.n + j]
    }

    /// Sets `c^k_ij = value` and `c^k_ji = -value`.
    pub fn set_antisymmetric(&mut self, k: usize, i: usize, j: usize, value: f64) {
        let n = self.n;
        self.c[(k * n + i) * n + j] = value;
        self.c[(k * n + j) * n + i] = -value;
    }

    /// Largest `|c^k_ij + c^k_ji|`.
    pub fn skew_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) + self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// `c^k_ij = -ε_ijk` for the right-invariant frame.
pub fn so3_structure_constants() -> StructureConstants {
    let mut c = StructureConstants::zeros(3);
    // [v1,v2] = -v3, [v2,v3] = -v1, [v3,v1] = -v2
    c.set_antisymmetric(2, 0, 1, -1.0);
    c.set_antisymmetric(0, 1, 2, -1.0);
    c.set_antisymmetric(1, 2, 0, -1.0);
    c
}

/// Nearest proper rotation (orthogonal polar factor) of a near-rotation.
pub fn reorthonormalize(m: &Mat3) -> Result<Rotation> {
    let ortho = orthogonality_residual(m);
    let det = m.determinant();
    if !(ortho < 0.1) || det <= 0.0 {
        return Err(Error::NotRotation { ortho, det });
    }
    let svd = m.svd(true, true);
    let min_sv = svd.singular_values.min();
    if min_sv < 1e-8 {
        return Err(Error::NotRotation { ortho, det });
    }
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    Ok(Rotation(u * v_t))
}
