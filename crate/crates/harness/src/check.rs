//! Certificates over a finished experiment directory.
//!
//! Each stored cell is regenerated with iterates recorded; the regenerated
//! CSV must match the stored one byte for byte before its certificates count.

use std::path::Path;

use adgd_core::diagnostics::{certificate_suite, check_stepsize_bounds, CertificateReport};
use adgd_core::solver::{run_solver, RunConfig, StepRule};

use crate::error::{HarnessError, Result};
use crate::experiment::{audit_stored, cell_run_config, load_manifest};
use crate::trace_csv;

#[derive(Debug, Clone)]
pub struct CellCheck {
    pub problem: String,
    pub rule: String,
    pub report: CertificateReport,
    pub issues: Vec<String>,
}

impl CellCheck {
    pub fn passed(&self) -> bool {
        self.issues.is_empty() && self.report.passed()
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub cells: Vec<CellCheck>,
    /// Problems with the stored CSVs and summary.
    pub audit: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.audit.is_empty() && self.cells.iter().all(CellCheck::passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for a in &self.audit {
            s.push_str(&format!("audit: {a}\n"));
        }
        for c in &self.cells {
            let status = if c.passed() { "pass" } else { "FAIL" };
            s.push_str(&format!("[{status}] {} / {}\n", c.problem, c.rule));
            for i in &c.issues {
                s.push_str(&format!("  issue: {i}\n"));
            }
            for line in c.report.to_text().lines() {
                s.push_str(&format!("  {line}\n"));
            }
        }
        s
    }
}

pub fn check_experiment(out: &Path) -> Result<CheckOutcome> {
    let manifest = load_manifest(out)?;
    let audit = audit_stored(out, &manifest)?;
    let mut cells = Vec::new();
    for p in &manifest.problems {
        let inst = p.descriptor.build()?;
        let run = RunConfig {
            record_iterates: true,
            ..cell_run_config(&manifest.config, p.reference.as_ref())
        };
        for c in manifest.cells.iter().filter(|c| c.problem == p.slug) {
            if c.status.starts_with("failed") {
                continue;
            }
            let rule = find_rule(&manifest.config.rule_list(), &c.rule, !inst.problem.g.is_zero())
                .ok_or_else(|| HarnessError::Diagnostics(format!("unknown rule {} in manifest", c.rule)))?;
            let trace = run_solver(&inst.problem, &inst.x0, &rule, &run).map_err(|e| HarnessError::Solver {
                cell: format!("{}/{}", c.problem, c.rule),
                source: e,
            })?;
            let mut issues = Vec::new();
            let path = out.join(&c.csv);
            let stored = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
            if stored != trace_csv::to_csv(&trace) {
                issues.push("regenerated trace differs from the stored CSV".to_string());
            }
            let reference = p.reference.as_ref().map(|r| &r.reference);
            let report = if inst.convex {
                certificate_suite(&trace, &inst.problem, reference)?
            } else {
                // Only the stepsize inequalities hold without convexity.
                check_stepsize_bounds(&trace)?
            };
            let rep_path = path.with_extension("certificates.txt");
            std::fs::write(&rep_path, report.to_text()).map_err(|e| HarnessError::io(&rep_path, e))?;
            cells.push(CellCheck {
                problem: c.problem.clone(),
                rule: c.rule.clone(),
                report,
                issues,
            });
        }
    }
    Ok(CheckOutcome { cells, audit })
}

/// Rule named `name` for a problem that is proximal when `prox` is set.
pub fn find_rule(rules: &[StepRule], name: &str, prox: bool) -> Option<StepRule> {
    rules.iter().copied().find(|r| r.name(prox) == name)
}
