//! Per-run CSV traces.
//!
//! The first twelve columns are fixed; `reused_evals` follows so that the
//! essential-operation count of product-metric problems can be rebuilt.

use std::fmt::Write as _;
use std::path::Path;

use adgd_core::accounting::Counters;
use adgd_core::solver::{Trace, TraceRow};

use crate::error::{HarnessError, Result};

pub const COLUMNS: [&str; 13] = [
    "iter",
    "alpha",
    "theta",
    "Lk",
    "F",
    "step_norm",
    "grad_evals",
    "func_evals",
    "prox_evals",
    "svd_count",
    "eig_count",
    "projection_count",
    "reused_evals",
];

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn header() -> String {
    COLUMNS.join(",")
}

pub fn format_row(r: &TraceRow) -> String {
    let c = &r.counters;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.k,
        format_float(r.alpha),
        format_float(r.theta),
        format_float(r.lk),
        format_float(r.f_value),
        format_float(r.step_norm),
        c.grad_evals,
        c.func_evals,
        c.prox_evals,
        c.svd_count,
        c.eig_count,
        c.projection_count,
        c.reused_evals
    )
}

pub fn to_csv(trace: &Trace) -> String {
    let mut out = header();
    out.push('\n');
    for r in &trace.rows {
        writeln!(out, "{}", format_row(r)).expect("string write");
    }
    out
}

pub fn parse_csv(text: &str, path: &Path) -> Result<Vec<TraceRow>> {
    let err = |line: usize, message: String| HarnessError::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header() => {}
        Some(h) => return Err(err(1, format!("unexpected header '{h}'"))),
        None => return Err(err(1, "empty file".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != COLUMNS.len() {
            return Err(err(n, format!("expected {} fields, got {}", COLUMNS.len(), fields.len())));
        }
        let float = |j: usize| -> Result<f64> {
            fields[j]
                .parse::<f64>()
                .map_err(|e| err(n, format!("column {}: {e}", COLUMNS[j])))
        };
        let int = |j: usize| -> Result<u64> {
            fields[j]
                .parse::<u64>()
                .map_err(|e| err(n, format!("column {}: {e}", COLUMNS[j])))
        };
        rows.push(TraceRow {
            k: int(0)? as usize,
            alpha: float(1)?,
            theta: float(2)?,
            lk: float(3)?,
            f_value: float(4)?,
            step_norm: float(5)?,
            counters: Counters {
                grad_evals: int(6)?,
                func_evals: int(7)?,
                prox_evals: int(8)?,
                svd_count: int(9)?,
                eig_count: int(10)?,
                projection_count: int(11)?,
                reused_evals: int(12)?,
            },
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_csv(&text, path)
}

/// Problems a stored trace violates: counters that decrease or reuse beyond evaluations.
pub fn counter_violations(rows: &[TraceRow]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if r.counters.reused_evals > r.counters.func_evals {
            out.push(format!("row {i}: reused_evals exceeds func_evals"));
        }
        if i > 0 && !r.counters.dominates(&rows[i - 1].counters) {
            out.push(format!("row {i}: a counter decreased"));
        }
    }
    out
}
