//! Certificates evaluated on recorded traces.
//!
//! Every check recomputes both sides of its inequality from the raw trace
//! (iterates, gradients, stepsizes and objective values), never from solver
//! state, so a pass is independent evidence. A check reports its worst case as
//! a signed slack `rhs - lhs` together with the tolerance applied there.

mod divergence;
mod energy;
mod stepsize;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Point, ReferenceSolution};
use crate::solver::{StepRule, Trace};

pub use divergence::{check_divergence_pattern, pattern_pairs};
pub use energy::{check_energy_gd, check_energy_prox, check_energy_prox_with, check_rate, radius_squared};
pub use stepsize::{
    check_gradient_monotonicity, check_stepsize_bounds, check_stepsize_sum, check_stepsize_sum_cross_checked,
    check_subgradient_norm, curvature_sweep, detect_breakpoints, reference_curvature, BreakpointRecord,
};

/// Outcome of one inequality family along a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// How the tolerance is built.
    pub tolerance: String,
    /// `rhs - lhs` at the worst iteration; negative means the raw inequality fails there.
    pub worst_slack: f64,
    /// Tolerance applied at the worst iteration.
    pub worst_tolerance: f64,
    pub worst_iter: Option<usize>,
    pub evaluated: usize,
    pub violations: usize,
    pub passed: bool,
    pub note: Option<String>,
}

impl CheckResult {
    /// A check that does not apply to this trace.
    pub fn not_asserted(name: &str, why: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            tolerance: "n/a".into(),
            worst_slack: f64::INFINITY,
            worst_tolerance: 0.0,
            worst_iter: None,
            evaluated: 0,
            violations: 0,
            passed: true,
            note: Some(why.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} status={} worst_slack={:e} tolerance_at_worst={:e} at={} evaluated={} violations={} tolerance=\"{}\"",
            self.name,
            if self.passed { "pass" } else { "fail" },
            self.worst_slack,
            self.worst_tolerance,
            self.worst_iter.map_or_else(|| "-".to_string(), |k| k.to_string()),
            self.evaluated,
            self.violations,
            self.tolerance,
        )?;
        if let Some(note) = &self.note {
            write!(f, " note=\"{note}\"")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CertificateReport {
    pub checks: Vec<CheckResult>,
}

impl CertificateReport {
    pub fn single(check: CheckResult) -> Self {
        CertificateReport { checks: vec![check] }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: CertificateReport) {
        self.checks.extend(other.checks);
    }

    /// One line per check.
    pub fn to_text(&self) -> String {
        self.checks.iter().map(|c| format!("{c}\n")).collect()
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Running worst case of `slack + tolerance`.
pub(crate) struct Scan {
    name: String,
    tolerance: String,
    worst: Option<(f64, f64, f64, usize)>,
    evaluated: usize,
    violations: usize,
}

impl Scan {
    pub(crate) fn new(name: &str, tolerance: impl Into<String>) -> Self {
        Scan {
            name: name.into(),
            tolerance: tolerance.into(),
            worst: None,
            evaluated: 0,
            violations: 0,
        }
    }

    /// Records `rhs - lhs = slack` at `iter` against tolerance `tol`.
    pub(crate) fn observe(&mut self, iter: usize, slack: f64, tol: f64) {
        self.evaluated += 1;
        let margin = slack + tol;
        let bad = !(margin >= 0.0);
        if bad {
            self.violations += 1;
        }
        let replace = match self.worst {
            None => true,
            Some((m, ..)) => !(margin >= m) && !(m.is_nan()),
        };
        if replace {
            self.worst = Some((margin, slack, tol, iter));
        }
    }

    pub(crate) fn finish(self) -> CheckResult {
        let (slack, tol, iter) = match self.worst {
            Some((_, s, t, k)) => (s, t, Some(k)),
            None => (f64::INFINITY, 0.0, None),
        };
        CheckResult {
            name: self.name,
            tolerance: self.tolerance,
            worst_slack: slack,
            worst_tolerance: tol,
            worst_iter: iter,
            evaluated: self.evaluated,
            violations: self.violations,
            passed: self.violations == 0,
            note: None,
        }
    }
}

/// The raw sequences a certificate may read.
///
/// With `K` rows: `x^0..x^K`, `grad f(x^0)..grad f(x^{K-1})`,
/// `alpha_0..alpha_{K-1}` and `F(x^0)..F(x^K)`.
pub(crate) struct TraceData<'a> {
    pub xs: &'a [Point],
    pub gs: &'a [Point],
    pub alphas: Vec<f64>,
    pub fvals: Vec<f64>,
    pub theta0: f64,
    pub proximal: bool,
}

impl<'a> TraceData<'a> {
    pub(crate) fn new(trace: &'a Trace) -> Result<Self> {
        let (Some(xs), Some(gs)) = (trace.iterates.as_deref(), trace.gradients.as_deref()) else {
            return Err(Error::IteratesRequired);
        };
        let k = trace.rows.len();
        if xs.len() != k + 1 || gs.len() < k {
            return Err(Error::InvalidParameter(format!(
                "trace has {k} rows but {} iterates and {} gradients",
                xs.len(),
                gs.len()
            )));
        }
        Ok(TraceData {
            xs,
            gs: &gs[..k],
            alphas: trace.alphas(),
            fvals: trace.objective_values(),
            theta0: trace.theta0,
            proximal: trace.proximal,
        })
    }

    /// Number of steps `K`.
    pub(crate) fn steps(&self) -> usize {
        self.alphas.len()
    }

    pub(crate) fn theta(&self, k: usize) -> f64 {
        if k == 0 {
            self.theta0
        } else {
            self.alphas[k] / self.alphas[k - 1]
        }
    }

    /// `||grad f(x^k) - grad f(x^{k-1})|| / ||x^k - x^{k-1}||`, with `0/0 = 0`.
    pub(crate) fn lk(&self, k: usize) -> f64 {
        let dx = (&self.xs[k] - &self.xs[k - 1]).norm();
        let dg = (&self.gs[k] - &self.gs[k - 1]).norm();
        if dg == 0.0 {
            0.0
        } else if dx == 0.0 {
            f64::INFINITY
        } else {
            dg / dx
        }
    }

    /// `v^k` recovered from consecutive iterates; `v^0 = 0`, and zero for smooth runs.
    pub(crate) fn subgradients(&self) -> Vec<Point> {
        let d = self.xs[0].len();
        (0..=self.steps())
            .map(|k| {
                if k == 0 || !self.proximal {
                    Point::zeros(d)
                } else {
                    (&self.xs[k - 1] - &self.xs[k]) / self.alphas[k - 1] - &self.gs[k - 1]
                }
            })
            .collect()
    }
}

pub(crate) fn reference_point(reference: Option<&ReferenceSolution>, dim: usize) -> Result<(Point, &ReferenceSolution)> {
    let r = reference.ok_or(Error::ReferenceRequired)?;
    if r.x_star.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: r.x_star.len(),
        });
    }
    Ok((r.point(), r))
}

/// Every certificate that applies to `trace`.
///
/// Energy and rate certificates need `reference`; the stepsize-structure
/// certificates only apply to the adaptive rule with the extra ratio bound.
pub fn certificate_suite(
    trace: &Trace,
    problem: &CompositeProblem,
    reference: Option<&ReferenceSolution>,
) -> Result<CertificateReport> {
    let mut report = CertificateReport::default();
    report.extend(check_stepsize_bounds(trace)?);
    report.extend(check_gradient_monotonicity(trace)?);
    if trace.proximal {
        report.extend(check_subgradient_norm(trace)?);
    }
    if matches!(trace.rule, StepRule::Adgd2) {
        if trace.proximal {
            report.extend(check_energy_prox(trace, reference)?);
        } else {
            report.extend(check_energy_gd(trace, reference)?);
        }
    } else {
        report.checks.push(CheckResult::not_asserted(
            "energy_decrease",
            format!("energy certificate is specific to adgd2, not {}", trace.rule_name()),
        ));
    }
    report.extend(check_rate(trace, reference)?);
    report.extend(check_stepsize_sum_cross_checked(trace, problem)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_tracks_smallest_margin() {
        let mut s = Scan::new("demo", "1e-3");
        s.observe(0, 1.0, 1e-3);
        s.observe(1, -2e-3, 1e-3);
        s.observe(2, -5e-4, 1e-3);
        let r = s.finish();
        assert!(!r.passed);
        assert_eq!(r.violations, 1);
        assert_eq!(r.worst_iter, Some(1));
        assert_eq!(r.worst_slack, -2e-3);
    }

    #[test]
    fn nan_slack_is_a_violation() {
        let mut s = Scan::new("demo", "0");
        s.observe(0, 1.0, 0.0);
        s.observe(3, f64::NAN, 0.0);
        s.observe(4, 2.0, 0.0);
        let r = s.finish();
        assert!(!r.passed);
        assert_eq!(r.worst_iter, Some(3));
    }

    #[test]
    fn report_text_has_one_line_per_check() {
        let mut rep = CertificateReport::default();
        rep.checks.push(CheckResult::not_asserted("a", "why"));
        let mut s = Scan::new("b", "1e-9");
        s.observe(2, 0.5, 1e-9);
        rep.checks.push(s.finish());
        let text = rep.to_text();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("check=b status=pass"));
        assert!(text.contains("tolerance=\"1e-9\""));
    }
}
