//! Iteration loops for every stepsize rule.
//!
//! Row `k` of a [`Trace`] describes the step from `x^k` to `x^{k+1}`: the
//! stepsize `alpha_k`, the ratio `theta_k`, the curvature estimate `L_k`
//! (undefined for `k = 0`), `F(x^{k+1})`, `||x^{k+1} - x^k||`, and the
//! operations spent so far to produce `x^{k+1}`.

pub mod rules;
pub mod search;

use serde::{Deserialize, Serialize};

use crate::accounting::{Counters, OpEvent};
use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Point};

pub use rules::{
    adgd2_second_bound, curvature_estimate, recover_subgradient, stepsize_adgd1, stepsize_adgd2, stepsize_bad_gd,
    stepsize_old_adgd, StepRule,
};
pub use search::{armijo_search, initial_stepsize_search, ArmijoOutcome};

use search::{backtrack, forward_backward, search_initial};

/// The two-iterate window every stepsize rule reads.
///
/// `x_curr = x^k` was produced from `x_prev = x^{k-1}` with stepsize `alpha`;
/// `theta = alpha / alpha_prev`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub k: usize,
    pub x_prev: Point,
    pub x_curr: Point,
    pub grad_prev: Point,
    pub grad_curr: Point,
    pub alpha: f64,
    pub alpha_prev: f64,
    pub theta: f64,
    /// `v^k`, proximal runs only.
    pub subgrad_curr: Option<Point>,
}

impl SolverState {
    /// Takes the first step `x^1 = prox_{alpha0 g}(x^0 - alpha0 grad f(x^0))`.
    pub fn initial(problem: &CompositeProblem, x0: &Point, alpha0: f64, theta0: f64) -> Result<Self> {
        problem.check_dim(x0)?;
        let mut scratch = Counters::default();
        let grad0 = problem.f.gradient(x0);
        let x1 = forward_backward(problem, x0, &grad0, alpha0, &mut scratch)?;
        let grad1 = problem.f.gradient(&x1);
        let subgrad = (!problem.g.is_zero()).then(|| recover_subgradient(&x1, x0, &grad0, alpha0));
        Ok(SolverState {
            k: 1,
            x_prev: x0.clone(),
            x_curr: x1,
            grad_prev: grad0,
            grad_curr: grad1,
            alpha: alpha0,
            alpha_prev: alpha0 / theta0,
            theta: theta0,
            subgrad_curr: subgrad,
        })
    }

    fn advance(&self, problem: &CompositeProblem, alpha: f64, x_next: Point, with_subgrad: bool) -> Self {
        let grad_next = problem.f.gradient(&x_next);
        let subgrad = with_subgrad.then(|| recover_subgradient(&x_next, &self.x_curr, &self.grad_curr, alpha));
        SolverState {
            k: self.k + 1,
            x_prev: self.x_curr.clone(),
            x_curr: x_next,
            grad_prev: self.grad_curr.clone(),
            grad_curr: grad_next,
            alpha,
            alpha_prev: self.alpha,
            theta: alpha / self.alpha,
            subgrad_curr: subgrad,
        }
    }
}

/// Stepsize from a curvature-driven rule, given `alpha_{k-1}`, `theta_{k-1}` and `L_k`.
pub fn next_stepsize(rule: &StepRule, alpha_prev: f64, theta_prev: f64, l_k: f64) -> Result<f64> {
    Ok(match *rule {
        StepRule::Adgd1 => stepsize_adgd1(alpha_prev, theta_prev, l_k),
        StepRule::Adgd2 => stepsize_adgd2(alpha_prev, theta_prev, l_k),
        StepRule::OldAdgd => stepsize_old_adgd(alpha_prev, theta_prev, l_k),
        StepRule::BadGd { c } => stepsize_bad_gd(c, l_k),
        StepRule::Fixed { alpha } => alpha,
        StepRule::Armijo { .. } => {
            return Err(Error::InvalidParameter("armijo steps come from a linesearch".into()));
        }
    })
}

/// One gradient step `x^{k+1} = x^k - alpha_k grad f(x^k)`; computes one new gradient.
pub fn gd_step(state: &SolverState, problem: &CompositeProblem, rule: &StepRule) -> Result<SolverState> {
    let l_k = curvature_estimate(&state.x_curr, &state.x_prev, &state.grad_curr, &state.grad_prev)?;
    let alpha = next_stepsize(rule, state.alpha, state.theta, l_k)?;
    let x_next = &state.x_curr - &state.grad_curr * alpha;
    Ok(state.advance(problem, alpha, x_next, false))
}

/// One proximal gradient step; Armijo rules backtrack from `s alpha_{k-1}`.
pub fn proxgd_step(state: &SolverState, problem: &CompositeProblem, rule: &StepRule) -> Result<SolverState> {
    let with_subgrad = !problem.g.is_zero();
    if let StepRule::Armijo { s, r } = *rule {
        let out = armijo_search(state, problem, s, r)?;
        return Ok(state.advance(problem, out.alpha, out.x_next, with_subgrad));
    }
    let l_k = curvature_estimate(&state.x_curr, &state.x_prev, &state.grad_curr, &state.grad_prev)?;
    let alpha = next_stepsize(rule, state.alpha, state.theta, l_k)?;
    let mut scratch = Counters::default();
    let x_next = forward_backward(problem, &state.x_curr, &state.grad_curr, alpha, &mut scratch)?;
    Ok(state.advance(problem, alpha, x_next, with_subgrad))
}

/// How `alpha_0` is obtained. Fixed and divergent rules ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", deny_unknown_fields)]
pub enum Alpha0Policy {
    Given { alpha: f64 },
    /// Factor-10 search from `start` for `alpha_0 L_1 in [1/sqrt 2, 2]`, stopped at `cap`.
    Search { start: f64, cap: f64 },
}

impl Default for Alpha0Policy {
    fn default() -> Self {
        Alpha0Policy::Search { start: 1.0, cap: 1e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub max_iter: usize,
    /// Stop once `||x^{k+1} - x^k|| / alpha_k <= grad_tol`.
    pub grad_tol: f64,
    pub alpha0: Alpha0Policy,
    /// Keep every iterate and gradient (needed by the certificates).
    pub record_iterates: bool,
    /// Feed this value to the stepsize rule in place of the measured `L_k`.
    pub curvature_override: Option<f64>,
    /// `||x^k||` beyond which a divergent-rule run is declared diverged.
    pub divergence_threshold: f64,
    /// Stop once `F(x^{k+1}) <= target_value`.
    pub target_value: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_iter: 1000,
            grad_tol: 1e-10,
            alpha0: Alpha0Policy::default(),
            record_iterates: false,
            curvature_override: None,
            divergence_threshold: 1e10,
            target_value: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("grad_tol {}", self.grad_tol)));
        }
        match self.alpha0 {
            Alpha0Policy::Given { alpha } if !(alpha > 0.0) => {
                Err(Error::InvalidParameter(format!("alpha0 {alpha} must be positive")))
            }
            Alpha0Policy::Search { start, cap } if !(start > 0.0 && cap > 0.0) => {
                Err(Error::InvalidParameter("search start and cap must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
    Diverged,
    TargetReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub alpha: f64,
    pub theta: f64,
    /// `NaN` for `k = 0`.
    pub lk: f64,
    /// `F(x^{k+1})`.
    pub f_value: f64,
    pub step_norm: f64,
    pub counters: Counters,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub label: String,
    pub rule: StepRule,
    /// True when `g` is not identically zero.
    pub proximal: bool,
    pub alpha0: f64,
    pub theta0: f64,
    /// `F(x^0)`.
    pub f0: f64,
    pub rows: Vec<TraceRow>,
    pub status: Status,
    /// `x^0, ..., x^K` when recorded.
    pub iterates: Option<Vec<Point>>,
    /// `grad f(x^0), ..., grad f(x^{K-1})` when recorded.
    pub gradients: Option<Vec<Point>>,
    pub x_final: Point,
}

impl Trace {
    pub fn rule_name(&self) -> String {
        self.rule.name(self.proximal)
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.alpha).collect()
    }

    /// `F(x^0), F(x^1), ..., F(x^K)`.
    pub fn objective_values(&self) -> Vec<f64> {
        std::iter::once(self.f0).chain(self.rows.iter().map(|r| r.f_value)).collect()
    }

    pub fn final_counters(&self) -> Counters {
        self.rows.last().map(|r| r.counters).unwrap_or_default()
    }

    /// First row whose objective is within `target`, if any.
    pub fn first_reaching(&self, target: f64) -> Option<&TraceRow> {
        self.rows.iter().find(|r| r.f_value <= target)
    }
}

struct Recorder {
    iterates: Option<Vec<Point>>,
    gradients: Option<Vec<Point>>,
}

impl Recorder {
    fn new(on: bool) -> Self {
        Recorder {
            iterates: on.then(Vec::new),
            gradients: on.then(Vec::new),
        }
    }
    fn iterate(&mut self, x: &Point) {
        if let Some(v) = self.iterates.as_mut() {
            v.push(x.clone());
        }
    }
    fn gradient(&mut self, g: &Point) {
        if let Some(v) = self.gradients.as_mut() {
            v.push(g.clone());
        }
    }
}

fn all_finite(x: &Point) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Runs `rule` from `x0` until the stopping test, `max_iter` steps, or divergence.
pub fn run_solver(problem: &CompositeProblem, x0: &Point, rule: &StepRule, config: &RunConfig) -> Result<Trace> {
    rule.validate()?;
    config.validate()?;
    problem.check_dim(x0)?;
    if !all_finite(x0) {
        return Err(Error::NonFinite {
            context: "starting point".into(),
        });
    }
    let f0 = crate::problem::evaluate_composite(problem, x0)?;
    if !f0.is_finite() {
        return Err(Error::InvalidParameter("starting point outside the domain of F".into()));
    }
    let cost = problem.cost;
    let divergent = matches!(rule, StepRule::BadGd { .. });
    let mut counters = Counters::default();
    let mut rec = Recorder::new(config.record_iterates);
    rec.iterate(x0);

    counters.record(OpEvent::Gradient, &cost);
    let mut grad = problem.f.gradient(x0);
    if !all_finite(&grad) {
        return Err(Error::NumericalFailure { iter: 0 });
    }

    let mut first_step: Option<(Point, Point)> = None;
    let alpha0 = match (*rule, config.alpha0) {
        (StepRule::BadGd { .. }, _) => 1.0,
        (StepRule::Fixed { alpha }, _) => alpha,
        (_, Alpha0Policy::Given { alpha }) => alpha,
        (_, Alpha0Policy::Search { start, cap }) => {
            match search_initial(problem, x0, &grad, start, cap, &mut counters) {
                Ok(s) => {
                    first_step = Some((s.x1, s.grad1));
                    s.alpha0
                }
                Err(Error::AlreadyStationary) => start.min(cap),
                Err(e) => return Err(e),
            }
        }
    };
    let theta0 = rule.theta0();

    let mut rows: Vec<TraceRow> = Vec::new();
    let mut x = x0.clone();
    let mut prev: Option<(Point, Point)> = None;
    let mut alpha_prev = alpha0;
    let mut theta_prev = theta0;
    let mut f_curr: Option<f64> = None;
    let mut status = Status::MaxIter;
    let mut pending_grad: Option<Point> = None;

    for k in 0..config.max_iter {
        if k > 0 {
            grad = match pending_grad.take() {
                Some(g) => g,
                None => {
                    counters.record(OpEvent::Gradient, &cost);
                    problem.f.gradient(&x)
                }
            };
            if !all_finite(&grad) {
                if divergent {
                    status = Status::Diverged;
                    break;
                }
                return Err(Error::NumericalFailure { iter: k });
            }
        }
        rec.gradient(&grad);

        let lk = match &prev {
            Some((xp, gp)) => curvature_estimate(&x, xp, &grad, gp)?,
            None => f64::NAN,
        };

        let (alpha, x_next, f_known) = match *rule {
            StepRule::Armijo { s, r } => {
                let fx = match f_curr {
                    Some(v) => v,
                    None => {
                        counters.record(OpEvent::Value, &cost);
                        problem.f.value(&x)
                    }
                };
                let first = if k == 0 { alpha0 } else { s * alpha_prev };
                let (candidate, candidate_grad) = match (k, first_step.take()) {
                    (0, Some((x1, g1))) => (Some(x1), Some(g1)),
                    _ => (None, None),
                };
                let out = backtrack(problem, &x, fx, &grad, first, r, k, &mut counters, candidate)?;
                if out.ls_evals == 1 {
                    pending_grad = candidate_grad;
                }
                (out.alpha, out.x_next, Some(out.f_next))
            }
            _ => {
                let alpha = if k == 0 {
                    alpha0
                } else {
                    next_stepsize(rule, alpha_prev, theta_prev, config.curvature_override.unwrap_or(lk))?
                };
                let x_next = match (k, first_step.take()) {
                    (0, Some((x1, g1))) => {
                        pending_grad = Some(g1);
                        x1
                    }
                    _ => {
                        if !(alpha.is_finite() && alpha > 0.0) {
                            if divergent {
                                status = Status::Diverged;
                                break;
                            }
                            return Err(Error::NumericalFailure { iter: k });
                        }
                        forward_backward(problem, &x, &grad, alpha, &mut counters)?
                    }
                };
                (alpha, x_next, None)
            }
        };
        let theta = if k == 0 { theta0 } else { alpha / alpha_prev };

        if !all_finite(&x_next) {
            if divergent {
                status = Status::Diverged;
                break;
            }
            return Err(Error::NumericalFailure { iter: k });
        }
        let step_norm = (&x_next - &x).norm();
        let f_smooth = f_known.unwrap_or_else(|| problem.f.value(&x_next));
        let f_value = f_smooth + problem.g.value_on_range(&x_next);
        rows.push(TraceRow {
            k,
            alpha,
            theta,
            lk,
            f_value,
            step_norm,
            counters,
        });
        rec.iterate(&x_next);

        if divergent && (x_next.norm() > config.divergence_threshold || !f_value.is_finite()) {
            status = Status::Diverged;
            x = x_next;
            break;
        }
        if !f_value.is_finite() {
            return Err(Error::NumericalFailure { iter: k });
        }
        let converged = step_norm == 0.0 || step_norm / alpha <= config.grad_tol;
        prev = Some((std::mem::replace(&mut x, x_next), grad.clone()));
        alpha_prev = alpha;
        theta_prev = theta;
        f_curr = f_known;
        if converged {
            status = Status::Converged;
            break;
        }
        if config.target_value.is_some_and(|t| f_value <= t) {
            status = Status::TargetReached;
            break;
        }
    }

    Ok(Trace {
        label: problem.label.clone(),
        rule: *rule,
        proximal: !problem.g.is_zero(),
        alpha0,
        theta0,
        f0,
        rows,
        status,
        iterates: rec.iterates,
        gradients: rec.gradients,
        x_final: x,
    })
}
