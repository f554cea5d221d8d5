//! Nonnegative matrix factorization objective (nonconvex).

use nalgebra::DMatrix;

use crate::problem::{matrix_to_vec, to_matrix, Point, SmoothFunction};

/// `f(U, V) = 1/2 ||U V^T - A||_F^2`, the point holds `U` then `V`, each row-major `n x r`.
#[derive(Debug, Clone)]
pub struct FactorizationLoss {
    pub a: DMatrix<f64>,
    pub rank: usize,
}

impl FactorizationLoss {
    pub fn split(&self, x: &Point) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.a.nrows();
        let block = n * self.rank;
        let u = to_matrix(&x.as_slice()[..block], n, self.rank);
        let v = to_matrix(&x.as_slice()[block..], self.a.ncols(), self.rank);
        (u, v)
    }

    pub fn join(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Point {
        let mut data = matrix_to_vec(u);
        data.extend(matrix_to_vec(v));
        Point::from_vec(data)
    }
}

impl SmoothFunction for FactorizationLoss {
    fn dim(&self) -> usize {
        (self.a.nrows() + self.a.ncols()) * self.rank
    }

    fn value(&self, x: &Point) -> f64 {
        let (u, v) = self.split(x);
        0.5 * (u * v.transpose() - &self.a).norm_squared()
    }

    fn gradient(&self, x: &Point) -> Point {
        let (u, v) = self.split(x);
        let residual = &u * v.transpose() - &self.a;
        let gu = &residual * &v;
        let gv = residual.tr_mul(&u);
        Self::join(&gu, &gv)
    }
}
