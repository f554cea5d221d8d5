//! Sign and magnitude pattern of the divergent method on the counterexample.

use crate::error::{Error, Result};
use crate::solver::{Status, Trace};

use super::{CertificateReport, CheckResult, Scan};

fn scalar_iterates(trace: &Trace) -> Result<Vec<f64>> {
    let xs = trace.iterates.as_ref().ok_or(Error::IteratesRequired)?;
    xs.iter()
        .map(|x| {
            if x.len() == 1 {
                Ok(x[0])
            } else {
                Err(Error::DimensionMismatch {
                    expected: 1,
                    got: x.len(),
                })
            }
        })
        .collect()
}

/// Whether pair `j` (`x^{2j}, x^{2j+1}` followed by `x^{2j+2}`) follows the pattern.
fn pair_holds(x: &[f64], j: usize) -> bool {
    let (a, b, c) = (x[2 * j], x[2 * j + 1], x[2 * j + 2]);
    a.signum() == b.signum() && c.signum() != a.signum() && c.abs() > 2.0 * b.abs() && 2.0 * b.abs() > a.abs()
}

/// Number of complete pairs from the start that follow the pattern without a break.
pub fn pattern_pairs(trace: &Trace) -> Result<usize> {
    let x = scalar_iterates(trace)?;
    let total = x.len().saturating_sub(1) / 2;
    Ok((0..total).take_while(|&j| pair_holds(&x, j)).count())
}

/// For every complete pair: `sign x^{2j} = sign x^{2j+1}`, `sign x^{2j+2} != sign x^{2j}`
/// and `|x^{2j+2}| > 2|x^{2j+1}| > |x^{2j}|`; plus a final diverged status.
pub fn check_divergence_pattern(trace: &Trace) -> Result<CertificateReport> {
    let x = scalar_iterates(trace)?;
    let total = x.len().saturating_sub(1) / 2;
    let mut scan = Scan::new("divergence_pattern", "exact");
    for j in 0..total {
        scan.observe(2 * j, if pair_holds(&x, j) { 0.0 } else { -1.0 }, 0.0);
    }
    let mut pattern = scan.finish();
    pattern.note = Some(format!("{total} complete pairs"));
    if total == 0 {
        pattern.passed = false;
        pattern.note = Some("no complete pair recorded".into());
    }
    let diverged = trace.status == Status::Diverged;
    let status = CheckResult {
        name: "diverged_status".into(),
        tolerance: "exact".into(),
        worst_slack: if diverged { 0.0 } else { -1.0 },
        worst_tolerance: 0.0,
        worst_iter: Some(trace.rows.len()),
        evaluated: 1,
        violations: usize::from(!diverged),
        passed: diverged,
        note: Some(format!("status {:?}", trace.status)),
    };
    Ok(CertificateReport {
        checks: vec![pattern, status],
    })
}
