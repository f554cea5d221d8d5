//! Stepsize inequalities, monotonicity facts and the stepsize-sum analysis.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::problem::{CompositeProblem, Point};
use crate::sampling;
use crate::solver::{StepRule, Trace};

use super::{CertificateReport, CheckResult, Scan, TraceData};

const BOUND_ABS: f64 = 1e-10;
const GROWTH_REL: f64 = 1e-12;
const MONO_REL: f64 = 1e-9;
const STRUCT_REL: f64 = 1e-10;

/// The two per-step inequalities each adaptive rule enforces, measured on the trace.
pub fn check_stepsize_bounds(trace: &Trace) -> Result<CertificateReport> {
    let data = TraceData::new(trace)?;
    let (grow, curv) = match trace.rule {
        StepRule::Adgd1 => (1.0, "curvature_bound"),
        StepRule::Adgd2 => (2.0 / 3.0, "curvature_bound"),
        _ => {
            return Ok(CertificateReport::single(CheckResult::not_asserted(
                "stepsize_bounds",
                format!("no adaptive bound for {}", trace.rule_name()),
            )))
        }
    };
    let mut growth = Scan::new("growth_bound", format!("relative {GROWTH_REL:e}"));
    let mut curvature = Scan::new(curv, format!("absolute {BOUND_ABS:e}"));
    for k in 1..data.steps() {
        let a = data.alphas[k];
        let a_prev = data.alphas[k - 1];
        let cap = (grow + data.theta(k - 1)).sqrt() * a_prev;
        growth.observe(k, cap - a, GROWTH_REL * cap);
        let lk = data.lk(k);
        let slack = match trace.rule {
            StepRule::Adgd1 => FRAC_1_SQRT_2 - a * lk,
            _ => 0.5 - (a * a * lk * lk - a * a / (2.0 * a_prev * a_prev)),
        };
        curvature.observe(k, slack, BOUND_ABS);
    }
    Ok(CertificateReport {
        checks: vec![growth.finish(), curvature.finish()],
    })
}

/// `<grad f(x^k) + v^k, grad f(x^{k-1}) + v^k> <= ||grad f(x^{k-1}) + v^k||^2` (`v = 0` for smooth runs).
pub fn check_gradient_monotonicity(trace: &Trace) -> Result<CertificateReport> {
    let data = TraceData::new(trace)?;
    let v = data.subgradients();
    let mut scan = Scan::new("gradient_inner_product", format!("{MONO_REL:e}*(1+rhs)"));
    for k in 1..data.steps() {
        let a = &data.gs[k] + &v[k];
        let b = &data.gs[k - 1] + &v[k];
        let rhs = b.norm_squared();
        scan.observe(k, rhs - a.dot(&b), MONO_REL * (1.0 + rhs));
    }
    Ok(CertificateReport::single(scan.finish()))
}

/// `||grad f(x^k) + v^{k+1}|| <= ||grad f(x^k) + v^k||` for `k = 0..K-1`.
pub fn check_subgradient_norm(trace: &Trace) -> Result<CertificateReport> {
    let data = TraceData::new(trace)?;
    let v = data.subgradients();
    let mut scan = Scan::new("subgradient_norm_decrease", format!("absolute {MONO_REL:e}"));
    for k in 0..data.steps() {
        let after = (&data.gs[k] + &v[k + 1]).norm();
        let before = (&data.gs[k] + &v[k]).norm();
        scan.observe(k, before - after, MONO_REL);
    }
    Ok(CertificateReport::single(scan.finish()))
}

/// `max_k L_k` over the trace.
pub fn reference_curvature(trace: &Trace) -> Result<f64> {
    let data = TraceData::new(trace)?;
    Ok(max_curvature(&data))
}

fn max_curvature(data: &TraceData) -> f64 {
    (1..data.steps()).map(|k| data.lk(k)).fold(0.0, f64::max)
}

/// True when `alpha_0 L_1 >= 1/sqrt 2`, the part of the initial-step rule the floor relies on.
fn searched_start(data: &TraceData) -> bool {
    data.steps() > 1 && data.alphas[0] * data.lk(1) >= FRAC_1_SQRT_2 * (1.0 - STRUCT_REL)
}

/// Iterations `m >= 1` with `theta_m < 1/3` and `alpha_m < 1/L_ref`.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointRecord {
    pub indices: Vec<usize>,
    pub l_ref: f64,
    /// Every `alpha_k < 1/(sqrt 2 L_ref)` sits right after a breakpoint,
    /// or one step later with `alpha_{k-1} < alpha_k`; exactly one of the two.
    pub dichotomy: CheckResult,
}

impl BreakpointRecord {
    pub fn contains(&self, m: usize) -> bool {
        self.indices.binary_search(&m).is_ok()
    }
}

fn breakpoints(data: &TraceData, l_ref: f64) -> Vec<usize> {
    (1..data.steps())
        .filter(|&m| data.theta(m) < 1.0 / 3.0 && data.alphas[m] * l_ref < 1.0)
        .collect()
}

pub fn detect_breakpoints(trace: &Trace, l_ref: f64) -> Result<BreakpointRecord> {
    let data = TraceData::new(trace)?;
    Ok(breakpoint_record(&data, l_ref))
}

fn breakpoint_record(data: &TraceData, l_ref: f64) -> BreakpointRecord {
    let indices = breakpoints(data, l_ref);
    let is_bp = |m: usize| indices.binary_search(&m).is_ok();
    let mut scan = Scan::new("breakpoint_dichotomy", "exact");
    let small = 1.0 / (SQRT_2 * l_ref);
    for k in 1..data.steps() {
        if data.alphas[k] >= small {
            continue;
        }
        let first = k >= 1 && is_bp(k - 1);
        let second = k >= 2 && data.alphas[k - 1] < data.alphas[k] && is_bp(k - 2);
        scan.observe(k, if first ^ second { 0.0 } else { -1.0 }, 0.0);
    }
    let mut dichotomy = scan.finish();
    if !searched_start(data) {
        dichotomy = CheckResult::not_asserted("breakpoint_dichotomy", "alpha_0 L_1 below 1/sqrt 2");
    }
    BreakpointRecord {
        indices,
        l_ref,
        dichotomy,
    }
}

/// Stepsize floor, stepsize sum and their ingredients, with `L_ref` standing in for the
/// Lipschitz constant on the trajectory.
pub fn check_stepsize_sum(trace: &Trace, l_ref: f64) -> Result<CertificateReport> {
    if !matches!(trace.rule, StepRule::Adgd2) {
        return Ok(CertificateReport::single(CheckResult::not_asserted(
            "stepsize_sum",
            format!("stepsize-sum analysis is specific to adgd2, not {}", trace.rule_name()),
        )));
    }
    let data = TraceData::new(trace)?;
    Ok(stepsize_sum(&data, l_ref))
}

fn stepsize_sum(data: &TraceData, l_ref: f64) -> CertificateReport {
    let n = data.steps();
    let a = &data.alphas;
    let rel = |v: f64| STRUCT_REL * v.abs();

    // Second bound active: alpha_{k-1} + alpha_k >= 2/L_k and alpha_k >= 1/(sqrt 2 L_k).
    let mut two_step = Scan::new("two_step_sum", format!("relative {STRUCT_REL:e}"));
    for k in 1..n {
        let cap = (2.0 / 3.0 + data.theta(k - 1)).sqrt() * a[k - 1];
        let lk = data.lk(k);
        if a[k] < cap * (1.0 - 1e-12) && lk > 0.0 {
            let need = 2.0 / lk;
            two_step.observe(k, a[k - 1] + a[k] - need, rel(need));
            let need = 1.0 / (SQRT_2 * lk);
            two_step.observe(k, a[k] - need, rel(need));
        }
    }

    // theta_k < 1/3 forces large preceding steps.
    let mut drop = Scan::new("ratio_drop_implications", format!("relative {STRUCT_REL:e}"));
    for k in 1..n {
        if data.theta(k) >= 1.0 / 3.0 {
            continue;
        }
        let lk = data.lk(k);
        let v = a[k - 1] * lk;
        drop.observe(k, v - 5f64.sqrt(), rel(5f64.sqrt()));
        if k >= 2 {
            drop.observe(k, a[k - 2] * lk - 1.5, rel(1.5));
        }
        if k >= 3 {
            drop.observe(k, a[k - 3] * lk - 1.0, rel(1.0));
        }
    }

    let searched = searched_start(data);
    let base = 1.0 / (3f64.sqrt() * l_ref);
    let floor = if searched { base } else { base.min(a[0]) };
    let mut floor_scan = Scan::new(
        "stepsize_floor",
        if searched {
            "floor 1/(sqrt 3 L_ref), absolute 1e-12*(1+floor)"
        } else {
            "floor min(alpha_0, 1/(sqrt 3 L_ref)), absolute 1e-12*(1+floor)"
        },
    );
    for (k, &ak) in a.iter().enumerate().skip(1) {
        floor_scan.observe(k, ak - floor, 1e-12 * (1.0 + floor));
    }

    let bps = breakpoint_record(data, l_ref);
    let mut window = Scan::new("breakpoint_window_sum", format!("relative {STRUCT_REL:e}"));
    for &m in &bps.indices {
        if m >= 2 && m + 2 < n {
            let s: f64 = a[m - 2..=m + 2].iter().sum();
            let need = 5.0 / l_ref;
            window.observe(m, s - need, rel(need));
        }
    }

    let mut sum = Scan::new("stepsize_sum", format!("relative {STRUCT_REL:e}"));
    let mut total = 0.0;
    for (k, &ak) in a.iter().enumerate().skip(1) {
        total += ak;
        let need = k as f64 / (SQRT_2 * l_ref);
        sum.observe(k, total - need, rel(need));
    }
    let mut sum = sum.finish();
    let mut window = window.finish();
    if !searched {
        sum = CheckResult::not_asserted("stepsize_sum", "alpha_0 L_1 below 1/sqrt 2");
        window = CheckResult::not_asserted("breakpoint_window_sum", "alpha_0 L_1 below 1/sqrt 2");
    }

    CertificateReport {
        checks: vec![
            two_step.finish(),
            drop.finish(),
            floor_scan.finish(),
            window,
            sum,
            bps.dichotomy,
        ],
    }
}

/// Largest curvature seen by finite differences along the trajectory.
///
/// Probes each segment `[x^{k-1}, x^k]` at its midpoint and each iterate along
/// `directions` random unit vectors with step `1e-5 (1 + ||x||)`. Probes where
/// the gradient is not finite (outside the domain of `f`) are skipped.
pub fn curvature_sweep(problem: &CompositeProblem, trace: &Trace, directions: usize, seed: u64) -> Result<f64> {
    let data = TraceData::new(trace)?;
    let mut rng = sampling::rng(seed);
    let mut best = max_curvature(&data);
    let ratio = |x: &Point, y: &Point, gx: &Point| -> Option<f64> {
        let gy = problem.f.gradient(y);
        let d = (y - x).norm();
        let v = (&gy - gx).norm() / d;
        (d > 0.0 && v.is_finite()).then_some(v)
    };
    let stride = (data.steps() / 200).max(1);
    for k in (0..data.steps()).step_by(stride) {
        let x = &data.xs[k];
        let gx = &data.gs[k];
        let mid = (x + &data.xs[k + 1]) * 0.5;
        if let Some(v) = ratio(x, &mid, gx) {
            best = best.max(v);
        }
        let h = 1e-5 * (1.0 + x.norm());
        for _ in 0..directions {
            let mut u = Point::from_fn(x.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let nu = u.norm();
            if nu == 0.0 {
                continue;
            }
            u /= nu;
            if let Some(v) = ratio(x, &(x + &u * h), gx) {
                best = best.max(v);
            }
        }
    }
    Ok(best)
}

/// [`check_stepsize_sum`] at `L_ref = max_k L_k`; failing checks are retried with the
/// finite-difference curvature and kept as failures only if they still fail.
pub fn check_stepsize_sum_cross_checked(trace: &Trace, problem: &CompositeProblem) -> Result<CertificateReport> {
    let l_ref = reference_curvature(trace)?;
    let mut report = check_stepsize_sum(trace, l_ref)?;
    if report.passed() {
        return Ok(report);
    }
    let l_fd = curvature_sweep(problem, trace, 4, 0)?;
    if !(l_fd > l_ref) {
        return Ok(report);
    }
    let retry = check_stepsize_sum(trace, l_fd)?;
    for c in report.checks.iter_mut() {
        if c.passed {
            continue;
        }
        if let Some(r) = retry.get(&c.name) {
            if r.passed {
                *c = r.clone().with_note(format!(
                    "stronger-form violation at L_ref={l_ref:e}; holds with finite-difference curvature {l_fd:e}"
                ));
            }
        }
    }
    Ok(report)
}
