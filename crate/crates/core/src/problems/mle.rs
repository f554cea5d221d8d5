//! Maximum likelihood estimate of an information matrix under eigenvalue bounds.

use nalgebra::DMatrix;

use crate::problem::{matrix_to_vec, to_matrix, Point, SmoothFunction};
use crate::sampling::{gaussian_vector, SeededRng};

/// `f(X) = -log det X + tr(XY)` over row-major `n x n` matrices.
///
/// The determinant goes through an LU factorization, so the value is also
/// defined for the slightly asymmetric points probed by finite differences.
#[derive(Debug, Clone)]
pub struct LogDetMle {
    pub n: usize,
    pub y: DMatrix<f64>,
}

impl LogDetMle {
    fn log_det(x: &DMatrix<f64>) -> Option<f64> {
        let lu = x.clone().lu();
        let u = lu.u();
        let mut sign: f64 = lu.p().determinant();
        let mut acc = 0.0;
        for i in 0..u.nrows() {
            let d = u[(i, i)];
            if d == 0.0 || !d.is_finite() {
                return None;
            }
            sign *= d.signum();
            acc += d.abs().ln();
        }
        (sign > 0.0).then_some(acc)
    }
}

impl SmoothFunction for LogDetMle {
    fn dim(&self) -> usize {
        self.n * self.n
    }

    fn value(&self, x: &Point) -> f64 {
        let xm = to_matrix(x.as_slice(), self.n, self.n);
        match Self::log_det(&xm) {
            Some(ld) => -ld + xm.component_mul(&self.y.transpose()).sum(),
            None => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &Point) -> Point {
        let xm = to_matrix(x.as_slice(), self.n, self.n);
        match xm.try_inverse() {
            Some(inv) => Point::from_vec(matrix_to_vec(&(&self.y - inv.transpose()))),
            None => Point::from_element(self.dim(), f64::NAN),
        }
    }
}

/// `Y = (1/M) sum y_i y_i^T` with `y_i = y + delta_i`, `y ~ N(0, 10^2)`, `delta_i ~ N(0, 1)`.
pub fn sample_covariance(rng: &mut SeededRng, n: usize, samples: usize) -> DMatrix<f64> {
    let y = gaussian_vector(rng, n) * 10.0;
    let mut acc = DMatrix::zeros(n, n);
    for _ in 0..samples {
        let yi = &y + gaussian_vector(rng, n);
        acc += &yi * yi.transpose();
    }
    acc / samples as f64
}
