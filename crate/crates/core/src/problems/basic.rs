//! Small unconstrained test objectives.

use nalgebra::{DMatrix, DVector};

use crate::problem::{Point, SmoothFunction};

/// `(c/2) ||x||^2`.
#[derive(Debug, Clone)]
pub struct ScaledSquare {
    dim: usize,
    curvature: f64,
}

impl ScaledSquare {
    pub fn new(dim: usize, curvature: f64) -> Self {
        ScaledSquare { dim, curvature }
    }
}

impl SmoothFunction for ScaledSquare {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Point) -> f64 {
        0.5 * self.curvature * x.norm_squared()
    }
    fn gradient(&self, x: &Point) -> Point {
        x * self.curvature
    }
}

/// `x^4` in one dimension: smooth on bounded sets only.
#[derive(Debug, Clone, Copy, Default)]
pub struct Quartic;

impl SmoothFunction for Quartic {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &Point) -> f64 {
        x[0].powi(4)
    }
    fn gradient(&self, x: &Point) -> Point {
        Point::from_element(1, 4.0 * x[0].powi(3))
    }
}

/// `1/2 x^T Q x - b^T x` with symmetric positive definite `Q`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub q: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl SmoothFunction for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn value(&self, x: &Point) -> f64 {
        0.5 * x.dot(&(&self.q * x)) - self.b.dot(x)
    }
    fn gradient(&self, x: &Point) -> Point {
        &self.q * x - &self.b
    }
}

/// `1/2 ||A x - b||^2`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl SmoothFunction for LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols()
    }
    fn value(&self, x: &Point) -> f64 {
        0.5 * (&self.a * x - &self.b).norm_squared()
    }
    fn gradient(&self, x: &Point) -> Point {
        self.a.tr_mul(&(&self.a * x - &self.b))
    }
}

/// Mean logistic loss `(1/n) sum log(1 + exp(-y_i a_i^T x))`, rows of `a` are samples.
#[derive(Debug, Clone)]
pub struct Logistic {
    pub a: DMatrix<f64>,
    pub labels: DVector<f64>,
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl SmoothFunction for Logistic {
    fn dim(&self) -> usize {
        self.a.ncols()
    }
    fn value(&self, x: &Point) -> f64 {
        let margins = &self.a * x;
        let n = self.labels.len() as f64;
        margins
            .iter()
            .zip(self.labels.iter())
            .map(|(m, y)| softplus(-y * m))
            .sum::<f64>()
            / n
    }
    fn gradient(&self, x: &Point) -> Point {
        let margins = &self.a * x;
        let n = self.labels.len() as f64;
        let weights = DVector::from_iterator(
            margins.len(),
            margins.iter().zip(self.labels.iter()).map(|(m, y)| -y * sigmoid(-y * m) / n),
        );
        self.a.tr_mul(&weights)
    }
}
