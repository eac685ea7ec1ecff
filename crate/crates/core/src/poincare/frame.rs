//! Frame-equipped manifolds in ambient coordinates.

use nalgebra::{DMatrix, DVector};

use crate::so3::{basis_hat, reorthonormalize, so3_structure_constants, StructureConstants};
use crate::{Error, Mat3, Result};

pub type DVec = DVector<f64>;

/// Largest frame condition number accepted when solving for frame coordinates.
pub const MAX_FRAME_CONDITION: f64 = 1e8;
/// Residual allowed when a vector is expected to lie in the span of the frame.
pub const TANGENT_TOL: f64 = 1e-10;

/// A manifold embedded in ℝ^m together with `n` pointwise independent vector
/// fields `v_k`, expressed in ambient coordinates.
pub trait FrameChart {
    /// Manifold dimension `n`.
    fn dim(&self) -> usize;
    /// Ambient coordinate count `m ≥ n`.
    fn ambient_dim(&self) -> usize;
    /// `m × n` matrix whose columns are `v_k(g)`.
    fn frame(&self, g: &DVec) -> DMatrix<f64>;
    /// Structure functions `c^k_ij(g)` with `[v_i, v_j] = Σ c^k_ij v_k`.
    fn structure(&self, g: &DVec) -> StructureConstants;
    /// True when `c^k_ij` do not depend on `g` (invariant frames on Lie groups).
    fn constant_structure(&self) -> bool {
        false
    }
    /// Maps an ambient point back onto the manifold.
    fn project(&self, g: DVec) -> Result<DVec> {
        Ok(g)
    }
}

/// ℝⁿ with the coordinate frame `v_k = ∂/∂g_k`; all brackets vanish.
#[derive(Debug, Clone, Copy)]
pub struct CoordinateChart {
    pub n: usize,
}

impl FrameChart for CoordinateChart {
    fn dim(&self) -> usize {
        self.n
    }
    fn ambient_dim(&self) -> usize {
        self.n
    }
    fn frame(&self, _g: &DVec) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n)
    }
    fn structure(&self, _g: &DVec) -> StructureConstants {
        StructureConstants::zeros(self.n)
    }
    fn constant_structure(&self) -> bool {
        true
    }
}

/// SO(3) embedded in ℝ⁹ (column-major matrix entries) with the
/// right-invariant frame `v_k(R) = hat(e_k) R`.
#[derive(Debug, Clone, Copy, Default)]
pub struct So3Chart;

impl So3Chart {
    pub fn to_ambient(m: &Mat3) -> DVec {
        DVec::from_column_slice(m.as_slice())
    }

    pub fn from_ambient(g: &DVec) -> Mat3 {
        Mat3::from_column_slice(g.as_slice())
    }
}

impl FrameChart for So3Chart {
    fn dim(&self) -> usize {
        3
    }
    fn ambient_dim(&self) -> usize {
        9
    }
    fn frame(&self, g: &DVec) -> DMatrix<f64> {
        let r = Self::from_ambient(g);
        let mut f = DMatrix::zeros(9, 3);
        for k in 0..3 {
            let v = basis_hat(k).expect("axis in range") * r;
            f.set_column(k, &DVec::from_column_slice(v.as_slice()));
        }
        f
    }
    fn structure(&self, _g: &DVec) -> StructureConstants {
        so3_structure_constants()
    }
    fn constant_structure(&self) -> bool {
        true
    }
    fn project(&self, g: DVec) -> Result<DVec> {
        let r = reorthonormalize(&Self::from_ambient(&g))?;
        Ok(Self::to_ambient(r.matrix()))
    }
}

/// Least-squares frame coordinates of `tangent` at `g`, guarded by the frame
/// condition number. No tangency check.
pub(crate) fn frame_solve<C: FrameChart + ?Sized>(
    chart: &C,
    g: &DVec,
    tangent: &DVec,
) -> Result<(DVec, f64)> {
    check_len(chart.ambient_dim(), tangent.len())?;
    let f = chart.frame(g);
    let svd = f.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond < MAX_FRAME_CONDITION) {
        return Err(Error::DegenerateFrame(cond));
    }
    let w = svd
        .solve(tangent, 0.0)
        .map_err(|_| Error::DegenerateFrame(cond))?;
    let residual = (&f * &w - tangent).norm();
    Ok((w, residual))
}

/// Frame coordinates `w` of a flow derivative: `dh^s g/ds|₀ = Σ w_k v_k(g)`.
pub fn current_from_flow<C: FrameChart + ?Sized>(
    chart: &C,
    g: &DVec,
    flow_derivative: &DVec,
) -> Result<DVec> {
    let (w, residual) = frame_solve(chart, g, flow_derivative)?;
    if residual > TANGENT_TOL * flow_derivative.norm().max(1.0) {
        return Err(Error::NotTangent(residual));
    }
    Ok(w)
}

/// Central-difference commutator `[v_i, v_j](g) = Dv_j·v_i − Dv_i·v_j`,
/// expressed in frame coordinates.
pub fn finite_difference_structure<C: FrameChart + ?Sized>(
    chart: &C,
    g: &DVec,
    h: f64,
) -> Result<StructureConstants> {
    let n = chart.dim();
    let f = chart.frame(g);
    let mut c = StructureConstants::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let vi = f.column(i).into_owned();
            let vj = f.column(j).into_owned();
            let dvj = (chart.frame(&(g + &vi * h)).column(j) - chart.frame(&(g - &vi * h)).column(j))
                / (2.0 * h);
            let dvi = (chart.frame(&(g + &vj * h)).column(i) - chart.frame(&(g - &vj * h)).column(i))
                / (2.0 * h);
            let (coords, _) = frame_solve(chart, g, &(dvj - dvi))?;
            for k in 0..n {
                c.set_antisymmetric(k, i, j, coords[k]);
            }
        }
    }
    Ok(c)
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{hat, so3_exp};
    use crate::Vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// ℝ² with `v1 = ∂x`, `v2 = (1 + x²) ∂y`: `[v1, v2] = 2x/(1+x²) v2`.
    struct WarpedPlane;

    impl FrameChart for WarpedPlane {
        fn dim(&self) -> usize {
            2
        }
        fn ambient_dim(&self) -> usize {
            2
        }
        fn frame(&self, g: &DVec) -> DMatrix<f64> {
            DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 + g[0] * g[0]])
        }
        fn structure(&self, g: &DVec) -> StructureConstants {
            let mut c = StructureConstants::zeros(2);
            c.set_antisymmetric(1, 0, 1, 2.0 * g[0] / (1.0 + g[0] * g[0]));
            c
        }
    }

    fn random_rotation(rng: &mut ChaCha8Rng) -> DVec {
        let v = Vec3::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        So3Chart::to_ambient(so3_exp(&v).matrix())
    }

    #[test]
    fn so3_rotation_flow_current() {
        let r = so3_exp(&Vec3::new(0.3, 0.2, -1.0));
        let g = So3Chart::to_ambient(r.matrix());
        // d/ds e^{s ẽ1} R = ẽ1 R
        let d = So3Chart::to_ambient(&(hat(&Vec3::x()) * r.matrix()));
        let w = current_from_flow(&So3Chart, &g, &d).unwrap();
        assert!((w - DVec::from_vec(vec![1.0, 0.0, 0.0])).norm() < 1e-12);

        let v2 = So3Chart.frame(&g).column(1).into_owned();
        let w = current_from_flow(&So3Chart, &g, &v2).unwrap();
        assert!((w - DVec::from_vec(vec![0.0, 1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn current_reconstruction_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_rotation(&mut rng);
            let coeff = DVec::from_fn(3, |_, _| rng.random_range(-2.0..2.0));
            let tangent = So3Chart.frame(&g) * &coeff;
            let w = current_from_flow(&So3Chart, &g, &tangent).unwrap();
            assert!((So3Chart.frame(&g) * w - &tangent).norm() < 1e-10);
        }
    }

    #[test]
    fn non_tangent_and_degenerate_rejected() {
        let g = So3Chart::to_ambient(&Mat3::identity());
        let sym = So3Chart::to_ambient(&Mat3::identity());
        assert!(matches!(
            current_from_flow(&So3Chart, &g, &sym),
            Err(Error::NotTangent(_))
        ));
        let singular = So3Chart::to_ambient(&Mat3::zeros());
        assert!(matches!(
            current_from_flow(&So3Chart, &singular, &sym),
            Err(Error::DegenerateFrame(_))
        ));
    }

    #[test]
    fn fd_brackets_match_structure_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = random_rotation(&mut rng);
            let fd = finite_difference_structure(&So3Chart, &g, 1e-4).unwrap();
            let exact = So3Chart.structure(&g);
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((fd.get(k, i, j) - exact.get(k, i, j)).abs() < 1e-7);
                    }
                }
            }

            let p = DVec::from_vec(vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]);
            let fd = finite_difference_structure(&WarpedPlane, &p, 1e-4).unwrap();
            let exact = WarpedPlane.structure(&p);
            assert!((fd.get(1, 0, 1) - exact.get(1, 0, 1)).abs() < 1e-7);
            assert!(fd.get(0, 0, 1).abs() < 1e-7);
            assert_eq!(exact.skew_defect(), 0.0);
        }
    }

    #[test]
    fn so3_projection_restores_orthogonality() {
        let mut m = so3_exp(&Vec3::new(1.0, 2.0, 0.5)).matrix().clone_owned();
        m[(0, 0)] += 1e-5;
        let g = So3Chart.project(So3Chart::to_ambient(&m)).unwrap();
        let r = So3Chart::from_ambient(&g);
        assert!((r.transpose() * r - Mat3::identity()).norm() < 1e-13);
    }
}
