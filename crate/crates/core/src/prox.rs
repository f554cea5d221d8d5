//! Proximal maps and projections used by the experiment problems.

use nalgebra::linalg::{Cholesky, SymmetricEigen};
use nalgebra::{DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::problem::{matrix_to_vec, to_matrix, Point, ProxCost, ProxFriendly};

/// Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 10_000;
const SVD_EPS: [f64; 4] = [5.0 * f64::EPSILON, 1e-14, 0.5 * f64::EPSILON, 1e-12];

/// `max(z_i, 0)` componentwise.
pub fn project_nonneg(z: &Point) -> Point {
    z.map(|v| v.max(0.0))
}

/// The identity, i.e. the prox of `g = 0` for any stepsize.
pub fn prox_zero(_alpha: f64, z: &Point) -> Point {
    z.clone()
}

/// Clamps the leading `m` multipliers at zero and leaves the trailing scalar free.
pub fn prox_dual_entropy_domain(z: &Point, m: usize) -> Point {
    let mut out = z.clone();
    for v in out.iter_mut().take(m) {
        *v = v.max(0.0);
    }
    out
}

/// Euclidean projection onto `{x : sum |x_i| <= r}` by sort-and-threshold.
pub fn project_l1_ball(v: &[f64], r: f64) -> Vec<f64> {
    assert!(r > 0.0, "l1-ball radius must be positive");
    let norm1: f64 = v.iter().map(|x| x.abs()).sum();
    if norm1 <= r {
        return v.to_vec();
    }
    let tau = l1_threshold(v, r);
    v.iter().map(|&x| x.signum() * (x.abs() - tau).max(0.0)).collect()
}

/// Soft-threshold level `tau` with `sum max(|v_i| - tau, 0) = r`, assuming `||v||_1 > r`.
fn l1_threshold(v: &[f64], r: f64) -> f64 {
    let mut u: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let candidate = (cumsum - r) / (j as f64 + 1.0);
        if uj - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    tau.max(0.0)
}

/// Projection onto `{x : Ax = b}` with a cached Cholesky factor of `A A^T`.
#[derive(Debug, Clone)]
pub struct AffineProjector {
    a: DMatrix<f64>,
    b: DVector<f64>,
    gram: Cholesky<f64, Dyn>,
}

impl AffineProjector {
    /// Requires `A` of full row rank with `m <= n`.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        if a.nrows() > a.ncols() {
            return Err(Error::InvalidParameter(format!(
                "affine constraint with m = {} > n = {}",
                a.nrows(),
                a.ncols()
            )));
        }
        let aat = &a * a.transpose();
        let scale = aat.diagonal().max().max(f64::MIN_POSITIVE);
        let gram = Cholesky::new(aat).ok_or_else(|| Error::Factorization("A A^T is not positive definite".into()))?;
        // Reject numerically rank-deficient systems.
        let min_pivot = gram.l_dirty().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if min_pivot * min_pivot < 1e-12 * scale {
            return Err(Error::Factorization("A A^T is numerically singular".into()));
        }
        Ok(AffineProjector { a, b, gram })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn residual(&self, x: &Point) -> f64 {
        (&self.a * x - &self.b).norm()
    }

    pub fn project(&self, z: &Point) -> Point {
        let mut p = z - self.a.tr_mul(&self.gram.solve(&(&self.a * z - &self.b)));
        // one refinement sweep
        let correction = self.a.tr_mul(&self.gram.solve(&(&self.a * &p - &self.b)));
        p -= correction;
        p
    }
}

/// `z - A^T (A A^T)^{-1} (A z - b)`.
pub fn project_affine(z: &Point, projector: &AffineProjector) -> Point {
    projector.project(z)
}

fn symmetrize(z: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !z.is_square() {
        return Err(Error::InvalidParameter(format!("{}x{} matrix is not square", z.nrows(), z.ncols())));
    }
    let scale = 1.0 + z.amax();
    let asym = (z - z.transpose()).amax() / scale;
    if asym > SYMMETRY_TOL {
        return Err(Error::Asymmetric(asym));
    }
    Ok((z + z.transpose()) * 0.5)
}

fn eigen(z: DMatrix<f64>) -> Result<SymmetricEigen<f64, Dyn>> {
    SymmetricEigen::try_new(z, f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::Factorization("symmetric eigendecomposition did not converge".into()))
}

/// Clamps the spectrum of symmetric `z` to `[lower, upper]`.
pub fn project_spectral_box(z: &DMatrix<f64>, lower: f64, upper: f64) -> Result<DMatrix<f64>> {
    if !(0.0 < lower && lower < upper) {
        return Err(Error::InvalidParameter(format!("spectral box [{lower}, {upper}]")));
    }
    let eig = eigen(symmetrize(z)?)?;
    let clamped = eig.eigenvalues.map(|v| v.clamp(lower, upper));
    let q = &eig.eigenvectors;
    let out = q * DMatrix::from_diagonal(&clamped) * q.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

/// Full SVD `z = U diag(s) V^T`, checked by reconstruction and orthonormality.
///
/// nalgebra's bidiagonal SVD occasionally stops on a wrong factorization for
/// rank-deficient inputs, depending on the convergence tolerance, so a few
/// tolerances and both orientations are tried.
fn checked_svd(z: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let scale = 1.0 + z.norm();
    let tall_first = z.nrows() >= z.ncols();
    for eps in SVD_EPS {
        for transposed in [!tall_first, tall_first] {
            let m = if transposed { z.transpose() } else { z.clone() };
            let Some(svd) = m.clone().try_svd(true, true, eps, MAX_SWEEPS) else { continue };
            let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^T"));
            let s = svd.singular_values;
            let k = s.len();
            let ok = (&u * DMatrix::from_diagonal(&s) * &v_t - &m).norm() <= 1e-10 * scale
                && (u.transpose() * &u - DMatrix::identity(k, k)).norm() <= 1e-10
                && (&v_t * v_t.transpose() - DMatrix::identity(k, k)).norm() <= 1e-10;
            if ok {
                return Ok(if transposed { (v_t.transpose(), s, u.transpose()) } else { (u, s, v_t) });
            }
        }
    }
    Err(Error::Factorization("SVD did not converge".into()))
}

/// Singular values of `z`, largest first.
pub fn singular_values(z: &DMatrix<f64>) -> Result<DVector<f64>> {
    let (_, mut s, _) = checked_svd(z)?;
    s.as_mut_slice().sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Projection onto the nuclear-norm ball `{X : ||X||_* <= r}`.
pub fn project_nuclear_ball(z: &DMatrix<f64>, r: f64) -> Result<DMatrix<f64>> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("nuclear-ball radius {r}")));
    }
    let (u, sigma, v_t) = checked_svd(z)?;
    if sigma.sum() <= r {
        return Ok(z.clone());
    }
    let projected = DVector::from_vec(project_l1_ball(sigma.as_slice(), r));
    Ok(u * DMatrix::from_diagonal(&projected) * v_t)
}

/// Closed convex sets and functions with cheap proximal maps.
#[derive(Debug, Clone)]
pub enum ProxOperator {
    /// `g = 0`.
    Zero,
    /// Indicator of the nonnegative orthant.
    NonNegative,
    /// Indicator of `{x : Ax = b}`.
    Affine(AffineProjector),
    /// Indicator of `{X symmetric : lower I <= X <= upper I}`, `X` stored row-major `n x n`.
    SpectralBox { n: usize, lower: f64, upper: f64 },
    /// Indicator of `{X : ||X||_* <= radius}`, `X` stored row-major.
    NuclearBall { rows: usize, cols: usize, radius: f64 },
    /// Indicator of `{(lambda, mu) : lambda >= 0}` with `lambda` of length `m`.
    DualEntropyDomain { m: usize },
}

const FEAS_TOL: f64 = 1e-9;

impl ProxOperator {
    /// True when `x` lies in the set (within a small rounding tolerance).
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            ProxOperator::Zero => true,
            ProxOperator::NonNegative => x.iter().all(|&v| v >= 0.0),
            ProxOperator::DualEntropyDomain { m } => x.iter().take(*m).all(|&v| v >= 0.0),
            ProxOperator::Affine(p) => p.residual(x) <= 1e-8 * (1.0 + p.rhs().norm()),
            ProxOperator::SpectralBox { n, lower, upper } => {
                let z = to_matrix(x.as_slice(), *n, *n);
                let Ok(sym) = symmetrize(&z) else { return false };
                let Ok(eig) = eigen(sym) else { return false };
                let tol = FEAS_TOL * upper.max(1.0);
                eig.eigenvalues.iter().all(|&v| v >= lower - tol && v <= upper + tol)
            }
            ProxOperator::NuclearBall { rows, cols, radius } => {
                let z = to_matrix(x.as_slice(), *rows, *cols);
                match singular_values(&z) {
                    Ok(s) => s.sum() <= radius * (1.0 + FEAS_TOL) + 1e-12,
                    Err(_) => false,
                }
            }
        }
    }

    fn expected_dim(&self) -> Option<usize> {
        match self {
            ProxOperator::Zero | ProxOperator::NonNegative => None,
            ProxOperator::DualEntropyDomain { m } => Some(m + 1),
            ProxOperator::Affine(p) => Some(p.matrix().ncols()),
            ProxOperator::SpectralBox { n, .. } => Some(n * n),
            ProxOperator::NuclearBall { rows, cols, .. } => Some(rows * cols),
        }
    }
}

impl ProxFriendly for ProxOperator {
    fn value(&self, x: &Point) -> f64 {
        if self.contains(x) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, alpha: f64, y: &Point) -> Result<Point> {
        if let Some(d) = self.expected_dim() {
            if y.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: y.len() });
            }
        }
        match self {
            ProxOperator::Zero => Ok(prox_zero(alpha, y)),
            ProxOperator::NonNegative => Ok(project_nonneg(y)),
            ProxOperator::DualEntropyDomain { m } => Ok(prox_dual_entropy_domain(y, *m)),
            ProxOperator::Affine(p) => Ok(project_affine(y, p)),
            ProxOperator::SpectralBox { n, lower, upper } => {
                let z = to_matrix(y.as_slice(), *n, *n);
                let out = project_spectral_box(&z, *lower, *upper)?;
                Ok(Point::from_vec(matrix_to_vec(&out)))
            }
            ProxOperator::NuclearBall { rows, cols, radius } => {
                let z = to_matrix(y.as_slice(), *rows, *cols);
                let out = project_nuclear_ball(&z, *radius)?;
                Ok(Point::from_vec(matrix_to_vec(&out)))
            }
        }
    }

    fn cost(&self) -> ProxCost {
        match self {
            ProxOperator::Zero => ProxCost::Free,
            ProxOperator::NonNegative | ProxOperator::DualEntropyDomain { .. } | ProxOperator::Affine(_) => {
                ProxCost::Projection
            }
            ProxOperator::SpectralBox { .. } => ProxCost::Eigendecomposition,
            ProxOperator::NuclearBall { .. } => ProxCost::Svd,
        }
    }

    fn value_on_range(&self, _x: &Point) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        matches!(self, ProxOperator::Zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{gaussian_matrix, gaussian_vector, rng};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn nonneg_clamps() {
        let z = Point::from_vec(vec![1.0, -2.0, 0.0]);
        assert_eq!(project_nonneg(&z).as_slice(), &[1.0, 0.0, 0.0]);
        let pos = Point::from_vec(vec![0.5, 3.0]);
        assert_eq!(project_nonneg(&pos), pos);
        let neg = Point::from_vec(vec![-0.5, -3.0, -1e-300]);
        assert_eq!(project_nonneg(&neg), Point::zeros(3));
    }

    #[test]
    fn dual_entropy_domain_leaves_scalar_free() {
        let z = Point::from_vec(vec![-1.0, 2.0, 3.0]);
        assert_eq!(prox_dual_entropy_domain(&z, 2).as_slice(), &[0.0, 2.0, 3.0]);
        let feasible = Point::from_vec(vec![0.0, 2.0, -5.0]);
        assert_eq!(prox_dual_entropy_domain(&feasible, 2), feasible);
        assert_eq!(prox_dual_entropy_domain(&feasible, 2)[2], -5.0);
    }

    #[test]
    fn zero_prox_is_identity_for_any_stepsize() {
        let z = Point::from_vec(vec![0.3, -7.0]);
        assert_eq!(prox_zero(1.0, &z), z);
        assert_eq!(prox_zero(1.0, &z), prox_zero(100.0, &z));
    }

    #[test]
    fn l1_projection_examples() {
        assert_close(&project_l1_ball(&[3.0, 0.0], 1.0), &[1.0, 0.0], 1e-15);
        assert_eq!(project_l1_ball(&[0.2, -0.3], 1.0), vec![0.2, -0.3]);
        assert_eq!(project_l1_ball(&[0.5, 0.5], 1.0), vec![0.5, 0.5]);
        let p = project_l1_ball(&[2.0, -1.0, 0.5], 1.5);
        let n1: f64 = p.iter().map(|v| v.abs()).sum();
        assert!((n1 - 1.5).abs() < 1e-14);
        assert!(p[1] <= 0.0);
    }

    #[test]
    fn affine_projection_examples() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let b = DVector::from_vec(vec![1.0]);
        let proj = AffineProjector::new(a, b).unwrap();
        assert_close(project_affine(&Point::zeros(2), &proj).as_slice(), &[1.0, 0.0], 1e-15);
        let feasible = Point::from_vec(vec![1.0, 7.5]);
        assert_close(project_affine(&feasible, &proj).as_slice(), feasible.as_slice(), 1e-12);
    }

    #[test]
    fn affine_rejects_rank_deficient() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(AffineProjector::new(a, b), Err(Error::Factorization(_))));
    }

    #[test]
    fn affine_projection_is_feasible_and_idempotent() {
        let mut rng = rng(7);
        let a = gaussian_matrix(&mut rng, 5, 12);
        let b = gaussian_vector(&mut rng, 5);
        let proj = AffineProjector::new(a, b.clone()).unwrap();
        for _ in 0..100 {
            let z = gaussian_vector(&mut rng, 12) * 10.0;
            let p = proj.project(&z);
            assert!(proj.residual(&p) <= 1e-8 * (1.0 + b.norm()));
            let pp = proj.project(&p);
            assert!((&pp - &p).norm() <= 1e-10);
        }
    }

    #[test]
    fn spectral_box_diagonal_example() {
        let z = DMatrix::from_diagonal(&DVector::from_vec(vec![0.05, 5.0, 20.0]));
        let p = project_spectral_box(&z, 0.1, 10.0).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 5.0, 10.0]));
        assert!((p - expected).amax() < 1e-12);
    }

    #[test]
    fn spectral_box_fixes_feasible_matrices() {
        let mut rng = rng(3);
        let q = gaussian_matrix(&mut rng, 4, 4).qr().q();
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, 1.0, 3.0, 9.0]));
        let z = &q * d * q.transpose();
        let p = project_spectral_box(&z, 0.1, 10.0).unwrap();
        assert!((p - &z).amax() < 1e-10);
    }

    #[test]
    fn spectral_box_output_spectrum_in_range() {
        let mut rng = rng(11);
        for _ in 0..50 {
            let g = gaussian_matrix(&mut rng, 6, 6) * 5.0;
            let z = (&g + g.transpose()) * 0.5;
            let p = project_spectral_box(&z, 0.1, 10.0).unwrap();
            let eig = p.symmetric_eigenvalues();
            assert!(eig.iter().all(|&v| v >= 0.1 - 1e-10 && v <= 10.0 + 1e-10), "{eig}");
        }
    }

    #[test]
    fn spectral_box_rejects_asymmetric_input() {
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(project_spectral_box(&z, 0.1, 10.0), Err(Error::Asymmetric(_))));
    }

    #[test]
    fn nuclear_ball_examples() {
        let z = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 0.0]));
        let p = project_nuclear_ball(&z, 1.0).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!((p - expected).amax() < 1e-12);

        let small = DMatrix::from_row_slice(2, 2, &[0.1, 0.2, -0.1, 0.05]);
        let p = project_nuclear_ball(&small, 1.0).unwrap();
        assert!((p - &small).amax() < 1e-10);
    }

    #[test]
    fn nuclear_ball_output_norm_bounded() {
        let mut rng = rng(5);
        for _ in 0..50 {
            let z = gaussian_matrix(&mut rng, 5, 7) * 3.0;
            let p = project_nuclear_ball(&z, 2.0).unwrap();
            let s = singular_values(&p).unwrap();
            assert!(s.sum() <= 2.0 + 1e-8, "{}", s.sum());
        }
    }

    #[test]
    fn operator_values_reflect_membership() {
        let op = ProxOperator::DualEntropyDomain { m: 2 };
        assert_eq!(op.value(&Point::from_vec(vec![0.0, 1.0, -4.0])), 0.0);
        assert_eq!(op.value(&Point::from_vec(vec![-1.0, 1.0, -4.0])), f64::INFINITY);
        assert_eq!(op.cost(), ProxCost::Projection);
        assert_eq!(ProxOperator::SpectralBox { n: 2, lower: 0.1, upper: 1.0 }.cost(), ProxCost::Eigendecomposition);
        assert!(ProxOperator::Zero.is_zero());
        assert!(!ProxOperator::NonNegative.is_zero());
    }

    #[test]
    fn operator_checks_dimension() {
        let op = ProxOperator::NuclearBall { rows: 2, cols: 2, radius: 1.0 };
        assert!(matches!(op.prox(1.0, &Point::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }
}
