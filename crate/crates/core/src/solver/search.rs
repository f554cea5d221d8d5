//! Searches: Armijo backtracking and the one-off initial stepsize search.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::accounting::{Counters, OpEvent};
use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Point};

use super::SolverState;

/// Trials before a search gives up.
pub const MAX_TRIALS: usize = 200;

/// Relative slack in the sufficient-decrease test, absorbing rounding in `f`.
pub const ARMIJO_SLACK: f64 = 1e-12;

/// Accepted Armijo trial.
#[derive(Debug, Clone)]
pub struct ArmijoOutcome {
    pub alpha: f64,
    pub x_next: Point,
    pub f_next: f64,
    /// Number of `f` / prox evaluation pairs performed.
    pub ls_evals: usize,
}

/// Proximal gradient point `prox_{alpha g}(x - alpha grad)`.
/// Records one prox evaluation unless `g = 0`.
pub(crate) fn forward_backward(
    p: &CompositeProblem,
    x: &Point,
    grad: &Point,
    alpha: f64,
    counters: &mut Counters,
) -> Result<Point> {
    let y = x - grad * alpha;
    if p.g.is_zero() {
        Ok(y)
    } else {
        counters.record(OpEvent::Prox, &p.cost);
        p.g.prox(alpha, &y)
    }
}

pub(crate) fn armijo_accepts(fx: f64, grad: &Point, x: &Point, x_next: &Point, f_next: f64, alpha: f64) -> bool {
    if !f_next.is_finite() {
        return false;
    }
    let d = x_next - x;
    let model = fx + grad.dot(&d) + d.norm_squared() / (2.0 * alpha);
    f_next <= model + ARMIJO_SLACK * (1.0 + fx.abs())
}

/// Backtracking over `first * r^i`, i = 0, 1, ... `first_point` is the
/// already computed candidate for `i = 0`, if any.
#[allow(clippy::too_many_arguments)]
pub(crate) fn backtrack(
    p: &CompositeProblem,
    x: &Point,
    fx: f64,
    grad: &Point,
    first: f64,
    r: f64,
    iter: usize,
    counters: &mut Counters,
    mut first_point: Option<Point>,
) -> Result<ArmijoOutcome> {
    let mut alpha = first;
    for i in 0..MAX_TRIALS {
        let x_next = match first_point.take() {
            Some(pt) => pt,
            None => forward_backward(p, x, grad, alpha, counters)?,
        };
        counters.record(OpEvent::Value, &p.cost);
        let f_next = p.f.value(&x_next);
        if armijo_accepts(fx, grad, x, &x_next, f_next, alpha) {
            counters.record(OpEvent::Reuse, &p.cost);
            return Ok(ArmijoOutcome {
                alpha,
                x_next,
                f_next,
                ls_evals: i + 1,
            });
        }
        alpha *= r;
    }
    Err(Error::LinesearchStalled {
        iter,
        trials: MAX_TRIALS,
    })
}

/// Largest `alpha = s r^i alpha_{k-1}` passing the sufficient-decrease test at `state.x_curr`.
pub fn armijo_search(state: &SolverState, problem: &CompositeProblem, s: f64, r: f64) -> Result<ArmijoOutcome> {
    if !(s > 1.0 && r > 0.0 && r < 1.0 && state.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("armijo needs s > 1, 0 < r < 1, got s={s}, r={r}")));
    }
    let mut counters = Counters::default();
    let fx = problem.f.value(&state.x_curr);
    backtrack(
        problem,
        &state.x_curr,
        fx,
        &state.grad_curr,
        s * state.alpha,
        r,
        state.k,
        &mut counters,
        None,
    )
}

/// Accepted initial trial: `x1` and its gradient are reused by the run.
#[derive(Debug, Clone)]
pub struct InitialStep {
    pub alpha0: f64,
    pub x1: Point,
    pub grad1: Point,
    pub trials: usize,
}

/// Geometric search by factors of 10 for `alpha0 * L_1 in [1/sqrt 2, 2]`,
/// bisecting geometrically once the target is bracketed, and stopping at `cap`
/// when the product stays too small.
pub(crate) fn search_initial(
    p: &CompositeProblem,
    x0: &Point,
    grad0: &Point,
    start: f64,
    cap: f64,
    counters: &mut Counters,
) -> Result<InitialStep> {
    if !(start > 0.0 && cap > 0.0) {
        return Err(Error::InvalidParameter(format!("search start {start} and cap {cap} must be positive")));
    }
    if p.g.is_zero() && grad0.iter().all(|&v| v == 0.0) {
        return Err(Error::AlreadyStationary);
    }
    let mut alpha = start.min(cap);
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    for trial in 1..=MAX_TRIALS {
        let x1 = forward_backward(p, x0, grad0, alpha, counters)?;
        let dx = (&x1 - x0).norm();
        if dx == 0.0 {
            return Err(Error::AlreadyStationary);
        }
        counters.record(OpEvent::Gradient, &p.cost);
        let grad1 = p.f.gradient(&x1);
        let l1 = (&grad1 - grad0).norm() / dx;
        if !l1.is_finite() {
            hi = Some(alpha);
        } else {
            let product = alpha * l1;
            if (FRAC_1_SQRT_2..=2.0).contains(&product) {
                return Ok(InitialStep {
                    alpha0: alpha,
                    x1,
                    grad1,
                    trials: trial,
                });
            }
            if product < FRAC_1_SQRT_2 {
                if alpha >= cap {
                    return Ok(InitialStep {
                        alpha0: alpha,
                        x1,
                        grad1,
                        trials: trial,
                    });
                }
                lo = Some(alpha);
            } else {
                hi = Some(alpha);
            }
        }
        alpha = match (lo, hi) {
            (Some(a), Some(b)) => (a * b).sqrt(),
            (Some(a), None) => (10.0 * a).min(cap),
            (_, Some(b)) => b / 10.0,
            (None, None) => unreachable!("one side is always set"),
        };
    }
    Err(Error::LinesearchStalled {
        iter: 0,
        trials: MAX_TRIALS,
    })
}

/// Initial stepsize with `alpha0 L_1 in [1/sqrt 2, 2]`, searched from 1; `cap` if the product stays small.
pub fn initial_stepsize_search(problem: &CompositeProblem, x0: &Point, cap: f64) -> Result<f64> {
    problem.check_dim(x0)?;
    let grad0 = problem.f.gradient(x0);
    let mut counters = Counters::default();
    Ok(search_initial(problem, x0, &grad0, 1.0, cap, &mut counters)?.alpha0)
}
