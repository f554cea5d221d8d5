//! Low-rank matrix completion: squared error on an observed index set.

use rand::seq::index;

use crate::problem::{Point, SmoothFunction};
use crate::sampling::SeededRng;

/// `f(X) = 1/2 sum_{(i,j) in Omega} (X_ij - A_ij)^2` over row-major `rows x cols` matrices.
#[derive(Debug, Clone)]
pub struct MaskedSquares {
    pub rows: usize,
    pub cols: usize,
    /// Sorted flat (row-major) indices of the observed entries.
    pub observed: Vec<usize>,
    pub targets: Vec<f64>,
}

impl MaskedSquares {
    pub fn new(rows: usize, cols: usize, truth: &[f64], mut observed: Vec<usize>) -> Self {
        observed.sort_unstable();
        let targets = observed.iter().map(|&i| truth[i]).collect();
        MaskedSquares {
            rows,
            cols,
            observed,
            targets,
        }
    }
}

impl SmoothFunction for MaskedSquares {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn value(&self, x: &Point) -> f64 {
        0.5 * self
            .observed
            .iter()
            .zip(&self.targets)
            .map(|(&i, t)| (x[i] - t).powi(2))
            .sum::<f64>()
    }

    fn gradient(&self, x: &Point) -> Point {
        let mut g = Point::zeros(self.dim());
        for (&i, t) in self.observed.iter().zip(&self.targets) {
            g[i] = x[i] - t;
        }
        g
    }
}

/// `round(fraction * total)` distinct flat indices, at least one.
pub fn sample_mask(rng: &mut SeededRng, total: usize, fraction: f64) -> Vec<usize> {
    let count = ((fraction * total as f64).round() as usize).clamp(1, total);
    index::sample(rng, total, count).into_vec()
}
