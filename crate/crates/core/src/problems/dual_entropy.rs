//! Dual of entropy maximization under linear inequality constraints.

use nalgebra::{DMatrix, DVector};

use crate::problem::{Point, SmoothFunction};

/// `f(lambda, mu) = e^{-mu-1} sum_i e^{-a_i^T lambda} + <b, lambda> + mu`,
/// with `a_i` the columns of the `m x n` matrix `a`.
#[derive(Debug, Clone)]
pub struct EntropyDual {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl EntropyDual {
    /// Weights `e^{-a_i^T lambda - mu - 1}`, computed with a max shift.
    fn weights(&self, x: &Point) -> Option<(DVector<f64>, f64)> {
        let m = self.a.nrows();
        let lambda = x.rows(0, m);
        let mu = x[m];
        let s = -self.a.tr_mul(&lambda);
        let shift = s.max();
        let scale = (shift - mu - 1.0).exp();
        if !scale.is_finite() {
            return None;
        }
        let w = s.map(|v| (v - shift).exp() * scale);
        let total = w.sum();
        total.is_finite().then_some((w, total))
    }
}

impl SmoothFunction for EntropyDual {
    fn dim(&self) -> usize {
        self.a.nrows() + 1
    }

    fn value(&self, x: &Point) -> f64 {
        let m = self.a.nrows();
        match self.weights(x) {
            Some((_, total)) => total + self.b.dot(&x.rows(0, m)) + x[m],
            None => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &Point) -> Point {
        let m = self.a.nrows();
        let Some((w, total)) = self.weights(x) else {
            return Point::from_element(m + 1, f64::NAN);
        };
        let mut g = Point::zeros(m + 1);
        g.rows_mut(0, m).copy_from(&(&self.b - &self.a * w));
        g[m] = 1.0 - total;
        g
    }
}
