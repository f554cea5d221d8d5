//! Length of the piecewise-linear curve through `(0, 0), (1, x_1), ..., (n, x_n)`.

use crate::problem::{Point, SmoothFunction};

/// `sqrt(1 + x_1^2) + sum_i sqrt(1 + (x_{i+1} - x_i)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct CurveLength {
    pub n: usize,
}

impl SmoothFunction for CurveLength {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Point) -> f64 {
        let head = x[0].hypot(1.0);
        head + x.as_slice().windows(2).map(|w| (w[1] - w[0]).hypot(1.0)).sum::<f64>()
    }

    fn gradient(&self, x: &Point) -> Point {
        let mut g = Point::zeros(self.n);
        g[0] = x[0] / x[0].hypot(1.0);
        for i in 0..self.n.saturating_sub(1) {
            let t = x[i + 1] - x[i];
            let s = t / t.hypot(1.0);
            g[i + 1] += s;
            g[i] -= s;
        }
        g
    }
}
