//! Problem abstractions shared by every other module.
//!
//! A [`CompositeProblem`] is `F = f + g` where `f` is convex and
//! differentiable (a [`SmoothFunction`]) and `g` is prox-friendly. Matrix
//! valued problems are flattened into a single [`Point`] in row-major order;
//! the [`Layout`] records how to read it back.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^d`.
pub type Point = DVector<f64>;

/// Convex differentiable part of the objective.
pub trait SmoothFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Point) -> f64;
    fn gradient(&self, x: &Point) -> Point;
}

/// Convex lower semicontinuous part with a cheap proximal map.
///
/// `value` may return `+inf` outside the domain; `prox` always returns a
/// point of the domain.
pub trait ProxFriendly: Send + Sync {
    fn value(&self, x: &Point) -> f64;
    fn prox(&self, alpha: f64, y: &Point) -> Result<Point>;
    /// Which essential operation one call to `prox` costs.
    fn cost(&self) -> ProxCost;
    /// `g` at a point returned by `prox`. Indicators override this with zero
    /// so that bookkeeping never repeats an expensive membership test.
    fn value_on_range(&self, x: &Point) -> f64 {
        self.value(x)
    }
    /// True when `g` is identically zero, so `prox` is the identity.
    fn is_zero(&self) -> bool {
        false
    }
}

/// The expensive kernel, if any, behind one prox evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxCost {
    Free,
    Projection,
    Svd,
    Eigendecomposition,
}

/// The quantity reported as "essential operations" for a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "metric")]
pub enum EssentialMetric {
    /// Weighted products: `grad_units` per gradient plus `value_units` per
    /// function value that could not be reused by the next gradient.
    Products { grad_units: u64, value_units: u64 },
    Projections,
    Svds,
    Eigendecompositions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub prox: ProxCost,
    pub essential: EssentialMetric,
}

impl CostModel {
    /// Plain gradient counting for unconstrained unit problems.
    pub fn gradients() -> Self {
        CostModel {
            prox: ProxCost::Free,
            essential: EssentialMetric::Products {
                grad_units: 1,
                value_units: 1,
            },
        }
    }
}

/// How a flat point maps back onto structured variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "layout")]
pub enum Layout {
    Vector,
    /// One row-major matrix.
    Matrix { rows: usize, cols: usize },
    /// Two row-major `rows x rank` factors stored back to back.
    Factors { rows: usize, rank: usize },
    /// A block of `m` multipliers followed by one free scalar.
    MultipliersAndScalar { m: usize },
}

/// `F = f + g` together with its operation-cost model.
#[derive(Clone)]
pub struct CompositeProblem {
    pub f: Arc<dyn SmoothFunction>,
    pub g: Arc<dyn ProxFriendly>,
    pub cost: CostModel,
    pub layout: Layout,
    pub label: String,
}

impl fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("cost", &self.cost)
            .field("layout", &self.layout)
            .finish()
    }
}

impl CompositeProblem {
    pub fn new(
        f: Arc<dyn SmoothFunction>,
        g: Arc<dyn ProxFriendly>,
        cost: CostModel,
        layout: Layout,
        label: impl Into<String>,
    ) -> Self {
        CompositeProblem {
            f,
            g,
            cost,
            layout,
            label: label.into(),
        }
    }

    /// Unconstrained problem, `g = 0`.
    pub fn smooth(f: Arc<dyn SmoothFunction>, label: impl Into<String>) -> Self {
        Self::new(
            f,
            Arc::new(crate::prox::ProxOperator::Zero),
            CostModel::gradients(),
            Layout::Vector,
            label,
        )
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn check_dim(&self, x: &Point) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// High-accuracy solution used by diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub x_star: Vec<f64>,
    pub f_star: f64,
    /// Estimated bound on `F(x_star) - F_*`.
    pub tolerance: f64,
    pub provenance: String,
    /// Set when the computation hit its budget before converging.
    #[serde(default)]
    pub low_confidence: bool,
}

impl ReferenceSolution {
    pub fn point(&self) -> Point {
        Point::from_column_slice(&self.x_star)
    }
}

/// `F(x) = f(x) + g(x)`, `+inf` when `x` is outside `dom g`.
pub fn evaluate_composite(p: &CompositeProblem, x: &Point) -> Result<f64> {
    p.check_dim(x)?;
    let gv = p.g.value(x);
    if gv == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(p.f.value(x) + gv)
}

/// Step used by [`finite_difference_gradient`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdStep {
    /// The same absolute step for every coordinate.
    Absolute(f64),
    /// `scale * (1 + |x_i|)` for coordinate `i`.
    Relative(f64),
}

impl Default for FdStep {
    fn default() -> Self {
        FdStep::Relative(1e-6)
    }
}

/// Central-difference estimate of the gradient of `f` at `x`.
pub fn finite_difference_gradient(f: &dyn SmoothFunction, x: &Point, step: FdStep) -> Result<Point> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    let mut out = Point::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let h = match step {
            FdStep::Absolute(h) => h,
            FdStep::Relative(s) => s * (1.0 + x[i].abs()),
        };
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("finite-difference step {h}")));
        }
        probe[i] = x[i] + h;
        let up = f.value(&probe);
        probe[i] = x[i] - h;
        let down = f.value(&probe);
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::NonFinite {
                context: format!("finite difference along coordinate {i}"),
            });
        }
        out[i] = (up - down) / (2.0 * h);
    }
    Ok(out)
}

/// Reads a row-major flattened block as a matrix.
pub fn to_matrix(data: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, data)
}

/// Flattens a matrix in row-major order.
pub fn matrix_to_vec(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::basic::{Quartic, ScaledSquare};
    use crate::problems::counterexample::Counterexample;
    use crate::prox::ProxOperator;

    fn half_square(dim: usize) -> CompositeProblem {
        CompositeProblem::smooth(Arc::new(ScaledSquare::new(dim, 1.0)), "half-square")
    }

    #[test]
    fn composite_at_minimum_of_centered_quadratic() {
        let p = half_square(2);
        assert_eq!(evaluate_composite(&p, &Point::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn composite_is_infinite_outside_indicator() {
        let p = CompositeProblem::new(
            Arc::new(ScaledSquare::new(1, 1.0)),
            Arc::new(ProxOperator::NonNegative),
            CostModel::gradients(),
            Layout::Vector,
            "orthant",
        );
        let v = evaluate_composite(&p, &Point::from_element(1, -1.0)).unwrap();
        assert_eq!(v, f64::INFINITY);
    }

    #[test]
    fn composite_quartic_value() {
        let p = CompositeProblem::smooth(Arc::new(Quartic), "quartic");
        assert_eq!(evaluate_composite(&p, &Point::from_element(1, 2.0)).unwrap(), 16.0);
    }

    #[test]
    fn composite_rejects_wrong_dimension() {
        let p = half_square(3);
        let err = evaluate_composite(&p, &Point::zeros(2)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn composite_is_deterministic() {
        let p = half_square(4);
        let x = Point::from_vec(vec![0.1, -2.5, 3.25, 1e-3]);
        let a = evaluate_composite(&p, &x).unwrap();
        let b = evaluate_composite(&p, &x).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn fd_gradient_of_half_square() {
        let f = ScaledSquare::new(1, 1.0);
        let g = finite_difference_gradient(&f, &Point::from_element(1, 3.0), FdStep::Absolute(1e-5)).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn fd_gradient_of_quartic() {
        let g = finite_difference_gradient(&Quartic, &Point::from_element(1, 1.0), FdStep::Absolute(1e-4)).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-6);
    }

    #[test]
    fn fd_gradient_of_counterexample() {
        // f'(x) = 2x / (1 + |x|) outside [-1, 1]
        let g = finite_difference_gradient(&Counterexample, &Point::from_element(1, 3.0), FdStep::Absolute(1e-6))
            .unwrap();
        assert!((g[0] - 1.5).abs() < 1e-8, "{}", g[0]);
    }

    #[test]
    fn fd_reports_non_finite_values() {
        struct Blowup;
        impl SmoothFunction for Blowup {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, x: &Point) -> f64 {
                if x[0] > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            fn gradient(&self, _x: &Point) -> Point {
                Point::zeros(1)
            }
        }
        let err = finite_difference_gradient(&Blowup, &Point::zeros(1), FdStep::default()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn row_major_round_trip() {
        let data: Vec<f64> = (0..6).map(f64::from).collect();
        let m = to_matrix(&data, 2, 3);
        assert_eq!(m[(0, 2)], 2.0);
        assert_eq!(m[(1, 0)], 3.0);
        assert_eq!(matrix_to_vec(&m), data);
    }
}
