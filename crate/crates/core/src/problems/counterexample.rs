//! One-dimensional convex function with a 1-Lipschitz derivative on which
//! gradient descent with a purely curvature-based stepsize diverges.

use crate::problem::{Point, SmoothFunction};

const A: f64 = 2.0;

/// Offset making the value continuous at `|x| = 1`.
pub fn offset() -> f64 {
    2.0 * std::f64::consts::LN_2 - 1.5
}

/// Value and derivative: `x^2 / 2` on `[-1, 1]`, `2(|x| - ln(1 + |x|)) + 2 ln 2 - 3/2` outside.
pub fn counterexample_f(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax <= 1.0 {
        (0.5 * x * x, x)
    } else {
        (A * (ax - ax.ln_1p()) + offset(), A * x / (1.0 + ax))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Counterexample;

impl SmoothFunction for Counterexample {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Point) -> f64 {
        counterexample_f(x[0]).0
    }

    fn gradient(&self, x: &Point) -> Point {
        Point::from_element(1, counterexample_f(x[0]).1)
    }
}
