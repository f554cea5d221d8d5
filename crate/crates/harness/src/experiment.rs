//! Runs a (problem x rule) matrix and writes traces, a summary and plots.
//!
//! Layout under `out`:
//! `manifest.json`, `summary.csv`, `summary.txt`, `references/`, and one
//! directory per problem holding `instance.json`, `<rule>.csv` and `gap.svg`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use adgd_core::accounting::Counters;
use adgd_core::problem::EssentialMetric;
use adgd_core::problems::{InstanceDescriptor, ProblemInstance};
use adgd_core::solver::{run_solver, RunConfig, Status, StepRule, Trace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::reference::{make_reference, ReferenceRecord};
use crate::{plot, trace_csv};

/// One finished (problem, rule) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub problem: String,
    pub rule: String,
    /// `converged`, `max_iter`, `diverged` or `failed: <reason>`.
    pub status: String,
    pub iterations: usize,
    /// Last objective value; `None` for failed runs and non-finite values.
    pub final_f: Option<f64>,
    pub metric: EssentialMetric,
    pub essential: u64,
    /// Essential operations when F first reached the reference target.
    pub essential_at_target: Option<u64>,
    pub counters: Counters,
    /// Relative to the output directory.
    pub csv: PathBuf,
}

/// Everything needed to revisit a finished experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub problems: Vec<ProblemRecord>,
    pub cells: Vec<CellSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub slug: String,
    pub descriptor: InstanceDescriptor,
    pub convex: bool,
    pub metric: EssentialMetric,
    pub reference: Option<ReferenceRecord>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub manifest: Manifest,
    pub summary_path: PathBuf,
    pub plots: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn failed_cells(&self) -> Vec<&CellSummary> {
        self.manifest.cells.iter().filter(|c| c.status.starts_with("failed")).collect()
    }
}

pub fn problem_dir(out: &Path, slug: &str) -> PathBuf {
    out.join(slug)
}

pub fn csv_path(out: &Path, slug: &str, rule: &str) -> PathBuf {
    problem_dir(out, slug).join(format!("{rule}.csv"))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

/// Builds every configured instance and writes its descriptor.
pub fn generate(cfg: &ExperimentConfig) -> Result<Vec<(ProblemInstance, PathBuf)>> {
    let mut out = Vec::new();
    for d in cfg.descriptors() {
        let inst = d.build()?;
        let dir = problem_dir(&cfg.out, &d.spec.slug());
        create_dir(&dir)?;
        let path = dir.join("instance.json");
        let text = serde_json::to_string_pretty(&serde_json::json!({
            "descriptor": d,
            "dimension": inst.x0.len(),
            "convex": inst.convex,
            "essential_metric": inst.problem.cost.essential.describe(),
            "x0": inst.x0.as_slice(),
        }))
        .expect("instance serializes");
        write(&path, &text)?;
        out.push((inst, path));
    }
    Ok(out)
}

/// References for every configured problem, using the cache.
pub fn references(cfg: &ExperimentConfig, instances: &[ProblemInstance]) -> Result<Vec<Option<ReferenceRecord>>> {
    let cache = cfg.reference_cache();
    instances
        .iter()
        .map(|inst| {
            if !cfg.reference.enabled {
                return Ok(None);
            }
            make_reference(inst, &cfg.reference, &cache).map(|(r, _)| Some(r))
        })
        .collect()
}

/// Solver settings for one cell: the shared settings plus the target stop.
pub fn cell_run_config(cfg: &ExperimentConfig, reference: Option<&ReferenceRecord>) -> RunConfig {
    RunConfig {
        target_value: if cfg.stop_at_target {
            reference.map(ReferenceRecord::target)
        } else {
            cfg.run.target_value
        },
        ..cfg.run
    }
}

fn run_cell(
    inst: &ProblemInstance,
    rule: &StepRule,
    run: &RunConfig,
    reference: Option<&ReferenceRecord>,
    out: &Path,
) -> Result<CellSummary> {
    let slug = inst.spec.slug();
    let metric = inst.problem.cost.essential;
    let rule_name = rule.name(!inst.problem.g.is_zero());
    let path = csv_path(out, &slug, &rule_name);
    let rel = PathBuf::from(&slug).join(format!("{rule_name}.csv"));
    let summary = match run_solver(&inst.problem, &inst.x0, rule, run) {
        Ok(trace) => {
            write(&path, &trace_csv::to_csv(&trace))?;
            summarize(&slug, &trace, metric, reference, rel)
        }
        Err(e) => {
            write(&path, &format!("{}\n", trace_csv::header()))?;
            CellSummary {
                problem: slug,
                rule: rule_name,
                status: format!("failed: {e}"),
                iterations: 0,
                final_f: None,
                metric,
                essential: 0,
                essential_at_target: None,
                counters: Counters::default(),
                csv: rel,
            }
        }
    };
    Ok(summary)
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Converged => "converged",
        Status::MaxIter => "max_iter",
        Status::Diverged => "diverged",
        Status::TargetReached => "target_reached",
    }
}

pub fn summarize(
    slug: &str,
    trace: &Trace,
    metric: EssentialMetric,
    reference: Option<&ReferenceRecord>,
    csv: PathBuf,
) -> CellSummary {
    let counters = trace.final_counters();
    CellSummary {
        problem: slug.into(),
        rule: trace.rule_name(),
        status: status_name(trace.status).into(),
        iterations: trace.rows.len(),
        final_f: Some(trace.rows.last().map_or(trace.f0, |r| r.f_value)).filter(|v| v.is_finite()),
        metric,
        essential: counters.essential(metric),
        essential_at_target: reference
            .and_then(|r| trace.first_reaching(r.target()))
            .map(|row| row.counters.essential(metric)),
        counters,
        csv,
    }
}

/// Runs the configured matrix and writes all artifacts under `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    create_dir(&cfg.out)?;
    let instances: Vec<ProblemInstance> = generate(cfg)?.into_iter().map(|(i, _)| i).collect();
    let refs = references(cfg, &instances)?;
    let rules = cfg.rule_list();
    let jobs: Vec<(usize, StepRule)> = (0..instances.len())
        .flat_map(|p| rules.iter().map(move |r| (p, *r)))
        .collect();
    let run_one = |&(p, rule): &(usize, StepRule)| {
        let run = cell_run_config(cfg, refs[p].as_ref());
        run_cell(&instances[p], &rule, &run, refs[p].as_ref(), &cfg.out)
    };
    let cells: Vec<CellSummary> = if cfg.parallel {
        jobs.par_iter().map(run_one).collect::<Result<_>>()?
    } else {
        jobs.iter().map(run_one).collect::<Result<_>>()?
    };

    let problems: Vec<ProblemRecord> = instances
        .iter()
        .zip(&refs)
        .map(|(inst, r)| ProblemRecord {
            slug: inst.spec.slug(),
            descriptor: inst.descriptor(),
            convex: inst.convex,
            metric: inst.problem.cost.essential,
            reference: r.clone(),
        })
        .collect();
    let summary_path = cfg.out.join("summary.csv");
    write(&summary_path, &summary_csv(&cells))?;
    write(&cfg.out.join("summary.txt"), &summary_table(&cells))?;
    let manifest = Manifest {
        config: cfg.clone(),
        problems,
        cells,
    };
    write(
        &cfg.out.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    let plots = if cfg.plot { plot::plot_experiment(&cfg.out, &manifest)? } else { Vec::new() };
    Ok(ExperimentOutcome {
        manifest,
        summary_path,
        plots,
    })
}

pub fn load_manifest(out: &Path) -> Result<Manifest> {
    let path = out.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Json {
        path,
        message: e.to_string(),
    })
}

const SUMMARY_COLUMNS: &str = "problem,rule,status,iterations,final_F,essential_metric,essential_total,\
essential_at_target,grad_evals,func_evals,prox_evals,svd_count,eig_count,projection_count,reused_evals";

pub fn summary_csv(cells: &[CellSummary]) -> String {
    let mut s = format!("{SUMMARY_COLUMNS}\n");
    for c in cells {
        let k = &c.counters;
        writeln!(
            s,
            "{},{},\"{}\",{},{},\"{}\",{},{},{},{},{},{},{},{},{}",
            c.problem,
            c.rule,
            c.status.replace('"', "'"),
            c.iterations,
            c.final_f.map_or(String::new(), trace_csv::format_float),
            c.metric.describe(),
            c.essential,
            c.essential_at_target.map_or(String::new(), |v| v.to_string()),
            k.grad_evals,
            k.func_evals,
            k.prox_evals,
            k.svd_count,
            k.eig_count,
            k.projection_count,
            k.reused_evals
        )
        .expect("string write");
    }
    s
}

/// Fixed-width table grouped by problem.
pub fn summary_table(cells: &[CellSummary]) -> String {
    let mut by_problem: BTreeMap<&str, Vec<&CellSummary>> = BTreeMap::new();
    for c in cells {
        by_problem.entry(&c.problem).or_default().push(c);
    }
    let mut s = String::new();
    for (problem, rows) in by_problem {
        writeln!(s, "{problem} ({})", rows[0].metric.describe()).expect("string write");
        writeln!(
            s,
            "  {:<18} {:<12} {:>8} {:>24} {:>12} {:>12}",
            "rule", "status", "iters", "final F", "essential", "at target"
        )
        .expect("string write");
        for c in rows {
            let status = if c.status.starts_with("failed") { "failed" } else { &c.status };
            writeln!(
                s,
                "  {:<18} {:<12} {:>8} {:>24} {:>12} {:>12}",
                c.rule,
                status,
                c.iterations,
                c.final_f.map_or("-".to_string(), |v| format!("{v:.15e}")),
                c.essential,
                c.essential_at_target.map_or("-".to_string(), |v| v.to_string())
            )
            .expect("string write");
        }
        s.push('\n');
    }
    s
}

/// Stored traces whose counters break monotonicity, or whose last row
/// disagrees with the summary totals.
pub fn audit_stored(out: &Path, manifest: &Manifest) -> Result<Vec<String>> {
    let mut issues = Vec::new();
    for c in &manifest.cells {
        let rows = trace_csv::read_csv(&out.join(&c.csv))?;
        for v in trace_csv::counter_violations(&rows) {
            issues.push(format!("{}/{}: {v}", c.problem, c.rule));
        }
        let last = rows.last().map(|r| r.counters).unwrap_or_default();
        if last != c.counters {
            issues.push(format!("{}/{}: summary totals differ from last trace row", c.problem, c.rule));
        }
    }
    Ok(issues)
}
