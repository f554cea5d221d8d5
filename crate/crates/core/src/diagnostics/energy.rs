//! Energy decrease and the resulting rate bound.

use crate::error::{Error, Result};
use crate::problem::{Point, ReferenceSolution};
use crate::solver::{StepRule, Trace};

use super::{reference_point, CertificateReport, CheckResult, Scan, TraceData};

const ENERGY_REL: f64 = 1e-7;
const RATE_REL: f64 = 1e-6;

/// Energy decrease for gradient descent:
///
/// `||x^{k+1}-x*||^2 + ||x^{k+1}-x^k||^2 + a_k(2+3t_k)(f(x^k)-f*)
///   <= ||x^k-x*||^2 + ||x^k-x^{k-1}||^2 + 3 a_k t_k (f(x^{k-1})-f*)`
/// for `k = 1..K-1`.
pub fn check_energy_gd(trace: &Trace, reference: Option<&ReferenceSolution>) -> Result<CertificateReport> {
    let data = TraceData::new(trace)?;
    let (x_star, r) = reference_point(reference, data.xs[0].len())?;
    let sq: Vec<f64> = (1..=data.steps()).map(|k| (&data.xs[k] - &data.xs[k - 1]).norm_squared()).collect();
    // sq[k-1] = ||x^k - x^{k-1}||^2
    Ok(CertificateReport::single(energy_scan(&data, &x_star, r, |k| sq[k], |k| sq[k - 1])))
}

/// Energy decrease for the proximal method, with `S^k = grad f(x^k) + v^k`:
///
/// `||x^{k+1}-x*||^2 + a_k^2 ||S^k||^2 + a_k(2+3t_k)(F(x^k)-F*)
///   <= ||x^k-x*||^2 + a_{k-1}^2 ||S^{k-1}||^2 + 3 a_k t_k (F(x^{k-1})-F*)`.
///
/// Subgradients are recovered from the iterates, `v^0 = 0`.
pub fn check_energy_prox(trace: &Trace, reference: Option<&ReferenceSolution>) -> Result<CertificateReport> {
    let data = TraceData::new(trace)?;
    let v = data.subgradients();
    energy_prox(&data, reference, &v)
}

/// As [`check_energy_prox`] with caller-supplied `v^0..v^K`.
pub fn check_energy_prox_with(
    trace: &Trace,
    reference: Option<&ReferenceSolution>,
    subgradients: &[Point],
) -> Result<CertificateReport> {
    let data = TraceData::new(trace)?;
    if subgradients.len() != data.steps() + 1 {
        return Err(Error::DimensionMismatch {
            expected: data.steps() + 1,
            got: subgradients.len(),
        });
    }
    energy_prox(&data, reference, subgradients)
}

fn energy_prox(data: &TraceData, reference: Option<&ReferenceSolution>, v: &[Point]) -> Result<CertificateReport> {
    let (x_star, r) = reference_point(reference, data.xs[0].len())?;
    let s: Vec<f64> = (0..data.steps())
        .map(|k| data.alphas[k].powi(2) * (&data.gs[k] + &v[k]).norm_squared())
        .collect();
    Ok(CertificateReport::single(energy_scan(data, &x_star, r, |k| s[k], |k| s[k - 1])))
}

/// Shared scan; `step_now(k)` and `step_before(k)` are the middle terms of the two sides.
fn energy_scan(
    data: &TraceData,
    x_star: &Point,
    r: &ReferenceSolution,
    step_now: impl Fn(usize) -> f64,
    step_before: impl Fn(usize) -> f64,
) -> CheckResult {
    let f_star = r.f_star;
    let dist: Vec<f64> = data.xs.iter().map(|x| (x - x_star).norm_squared()).collect();
    let mut scan = Scan::new(
        "energy_decrease",
        format!("{ENERGY_REL:e}*(1+E_1) + 2*tol_ref*max(1, 2 alpha_k)"),
    );
    let rhs_at = |k: usize| {
        let a = data.alphas[k];
        let t = data.theta(k);
        dist[k] + step_before(k) + 3.0 * a * t * (data.fvals[k - 1] - f_star)
    };
    if data.steps() < 2 {
        return scan.finish().with_note("fewer than two steps");
    }
    let e1 = rhs_at(1);
    let base = ENERGY_REL * (1.0 + e1.abs());
    for k in 1..data.steps() {
        let a = data.alphas[k];
        let t = data.theta(k);
        let lhs = dist[k + 1] + step_now(k) + a * (2.0 + 3.0 * t) * (data.fvals[k] - f_star);
        let rhs = rhs_at(k);
        let tol = base + 2.0 * r.tolerance * (2.0 * a).max(1.0);
        scan.observe(k, rhs - lhs, tol);
    }
    scan.finish()
}

/// `||x^0-x*||^2 + 2 a_0^2 ||grad f(x^0) + v^0||^2 + a_0 (F(x^0)-F*)` with `v^0 = 0`.
pub fn radius_squared(trace: &Trace, reference: &ReferenceSolution) -> Result<f64> {
    let data = TraceData::new(trace)?;
    let (x_star, r) = reference_point(Some(reference), data.xs[0].len())?;
    Ok(radius_sq(&data, &x_star, r))
}

fn radius_sq(data: &TraceData, x_star: &Point, r: &ReferenceSolution) -> f64 {
    let a0 = data.alphas[0];
    (&data.xs[0] - x_star).norm_squared() + 2.0 * a0 * a0 * data.gs[0].norm_squared() + a0 * (data.fvals[0] - r.f_star)
}

/// `min_{1<=i<=k} (F(x^i)-F*) <= R^2 / (2 sum_{i=1}^k a_i)` for `k = 1..K-1`.
///
/// Only asserted for the adaptive rule with the extra ratio bound.
pub fn check_rate(trace: &Trace, reference: Option<&ReferenceSolution>) -> Result<CertificateReport> {
    if !matches!(trace.rule, StepRule::Adgd2) {
        return Ok(CertificateReport::single(CheckResult::not_asserted(
            "rate_bound",
            format!("rate bound is specific to adgd2, not {}", trace.rule_name()),
        )));
    }
    let data = TraceData::new(trace)?;
    let (x_star, r) = reference_point(reference, data.xs[0].len())?;
    let mut scan = Scan::new("rate_bound", format!("{RATE_REL:e}*bound + 2*tol_ref"));
    if data.steps() == 0 {
        return Ok(CertificateReport::single(scan.finish().with_note("empty trace")));
    }
    let r2 = radius_sq(&data, &x_star, r);
    let mut best = f64::INFINITY;
    let mut sum = 0.0;
    for k in 1..data.steps() {
        best = best.min(data.fvals[k] - r.f_star);
        sum += data.alphas[k];
        let bound = r2 / (2.0 * sum);
        scan.observe(k, bound - best, RATE_REL * bound.abs() + 2.0 * r.tolerance);
    }
    Ok(CertificateReport::single(scan.finish()))
}
