use std::fs;
use std::path::{Path, PathBuf};

use adgd_core::problems::{self, ProblemSpec, Scale};
use adgd_core::solver::{run_solver, StepRule};
use adgd_harness::check::check_experiment;
use adgd_harness::cli::run_cli;
use adgd_harness::config::ProblemEntry;
use adgd_harness::experiment::{audit_stored, load_manifest};
use adgd_harness::plot::plot_experiment;
use adgd_harness::reference::{compute_reference, iterative_reference, make_reference, CacheStatus};
use adgd_harness::trace_csv;
use adgd_harness::{run_experiment, ExperimentConfig, ReferenceConfig};

fn small_config(out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::benchmarks(3, Scale::Desk, out);
    cfg.problems = vec![
        ProblemEntry {
            benchmark: None,
            spec: Some(ProblemSpec::Quadratic { n: 10, condition: 50.0 }),
            seed: None,
        },
        ProblemEntry {
            benchmark: None,
            spec: Some(ProblemSpec::Lrmc {
                n: 12,
                rank: 2,
                fraction: 0.3,
                radius: None,
            }),
            seed: None,
        },
        ProblemEntry {
            benchmark: None,
            spec: Some(ProblemSpec::DualEntropy { m: 20, n: 6 }),
            seed: Some(11),
        },
    ];
    cfg.rules = vec![StepRule::Adgd2, StepRule::Armijo { s: 1.2, r: 0.5 }, StepRule::Armijo { s: 1.5, r: 0.9 }];
    cfg.run.max_iter = 300;
    cfg.reference.max_iter = 50_000;
    cfg
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(csv_files(&p));
        } else if p.extension().is_some_and(|x| x == "csv") {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("adgd").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn single_cell_config_writes_one_csv_and_one_summary_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.problems.truncate(1);
    cfg.rules.truncate(1);
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.manifest.cells.len(), 1);
    let csvs: Vec<_> = csv_files(dir.path())
        .into_iter()
        .filter(|p| p.file_name().unwrap() != "summary.csv")
        .collect();
    assert_eq!(csvs.len(), 1);
    let summary = fs::read_to_string(&outcome.summary_path).unwrap();
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn stored_rows_parse_back_losslessly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let outcome = run_experiment(&cfg).unwrap();
    let inst = problems::make_lrmc(3, 12, 2, 0.3).unwrap();
    let trace = run_solver(&inst.problem, &inst.x0, &StepRule::Adgd2, &cfg.run).unwrap();
    let cell = outcome
        .manifest
        .cells
        .iter()
        .find(|c| c.problem.starts_with("lrmc") && c.rule == "adproxgd")
        .unwrap();
    let rows = trace_csv::read_csv(&dir.path().join(&cell.csv)).unwrap();
    assert_eq!(rows.len(), trace.rows.len());
    for (a, b) in rows.iter().zip(&trace.rows) {
        assert_eq!(a.k, b.k);
        assert_eq!(a.counters, b.counters);
        for (u, v) in [(a.alpha, b.alpha), (a.theta, b.theta), (a.f_value, b.f_value), (a.step_norm, b.step_norm)] {
            assert_eq!(u.to_bits(), v.to_bits());
        }
        assert!(a.lk.to_bits() == b.lk.to_bits() || (a.lk.is_nan() && b.lk.is_nan()));
    }
    let text = fs::read_to_string(dir.path().join(&cell.csv)).unwrap();
    assert!(text.lines().all(|l| l.split(',').count() == trace_csv::COLUMNS.len()));
}

#[test]
fn summary_totals_match_last_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let outcome = run_experiment(&cfg).unwrap();
    assert!(audit_stored(dir.path(), &outcome.manifest).unwrap().is_empty());
    for c in &outcome.manifest.cells {
        let rows = trace_csv::read_csv(&dir.path().join(&c.csv)).unwrap();
        assert_eq!(rows.last().unwrap().counters, c.counters);
        assert_eq!(c.essential, c.counters.essential(c.metric));
    }
}

#[test]
fn repeated_and_parallel_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&small_config(a.path())).unwrap();
    let mut cfg = small_config(b.path());
    cfg.parallel = true;
    run_experiment(&cfg).unwrap();
    let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.strip_prefix(a.path()).unwrap(), y.strip_prefix(b.path()).unwrap());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn plotting_reads_but_never_changes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    run_experiment(&cfg).unwrap();
    let before: Vec<Vec<u8>> = csv_files(dir.path()).iter().map(|p| fs::read(p).unwrap()).collect();
    let manifest = load_manifest(dir.path()).unwrap();
    let plots = plot_experiment(dir.path(), &manifest).unwrap();
    assert_eq!(plots.len(), 3);
    for p in &plots {
        let svg = fs::read_to_string(p).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
    let after: Vec<Vec<u8>> = csv_files(dir.path()).iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn stored_experiment_passes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&small_config(dir.path())).unwrap();
    let outcome = check_experiment(dir.path()).unwrap();
    assert_eq!(outcome.cells.len(), 9);
    assert!(outcome.passed(), "{}", outcome.to_text());
}

#[test]
fn stop_at_target_ends_runs_at_the_reference_level() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.stop_at_target = true;
    cfg.run.max_iter = 100_000;
    let outcome = run_experiment(&cfg).unwrap();
    for c in &outcome.manifest.cells {
        assert_eq!(c.status, "target_reached", "{}/{}", c.problem, c.rule);
        assert_eq!(c.essential_at_target, Some(c.essential));
    }
    assert!(check_experiment(dir.path()).unwrap().passed());
}

#[test]
fn quadratic_reference_matches_linear_solve() {
    let inst = problems::make_quadratic(5, 15, 30.0).unwrap();
    let closed = inst.reference.clone().unwrap();
    let (r, _) = iterative_reference(&inst, &inst.x0, &ReferenceConfig::default()).unwrap();
    let err = r
        .x_star
        .iter()
        .zip(&closed.x_star)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(err <= 1e-10, "{err}");
    assert!(!r.low_confidence);
}

#[test]
fn reference_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let inst = problems::make_logistic(2, 5, 30).unwrap();
    let cfg = ReferenceConfig::default();
    let (first, s1) = make_reference(&inst, &cfg, dir.path()).unwrap();
    let path = adgd_harness::reference::cache_path(dir.path(), &inst.descriptor());
    let stamp = fs::metadata(&path).unwrap().modified().unwrap();
    let (second, s2) = make_reference(&inst, &cfg, dir.path()).unwrap();
    assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
    assert_eq!(first, second);
    assert_eq!(fs::metadata(&path).unwrap().modified().unwrap(), stamp);
    let changed = ReferenceConfig {
        tol: 1e-10,
        ..cfg
    };
    assert_eq!(make_reference(&inst, &changed, dir.path()).unwrap().1, CacheStatus::Miss);
}

#[test]
fn nonconvex_reference_is_best_of_restart_sweep() {
    let inst = problems::make_nmf(4, 8, 2).unwrap();
    let cfg = ReferenceConfig {
        max_iter: 20_000,
        ..ReferenceConfig::default()
    };
    let rec = compute_reference(&inst, &cfg).unwrap();
    assert!(rec.best_found);
    assert!(rec.reference.provenance.starts_with("best-found over 10 restarts"));
    let (single, _) = iterative_reference(&inst, &inst.x0, &cfg).unwrap();
    assert!(rec.reference.f_star <= single.f_star);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    let out = dir.path().join("out");
    let mut cfg = small_config(&out);
    cfg.problems.truncate(2);
    cfg.plot = true;
    fs::write(&cfg_path, cfg.to_toml_string()).unwrap();
    let cfg_arg = cfg_path.to_str().unwrap();

    let (code, stdout, stderr) = cli(&["run", "--config", cfg_arg, "--check"]);
    assert_eq!(code, 0, "{stdout}\n{stderr}");
    assert!(out.join("summary.txt").exists());
    assert!(stdout.contains("plot:"));

    let (code, _, _) = cli(&["check", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, stdout, _) = cli(&["plot", "--config", cfg_arg]);
    assert_eq!(code, 0, "{stdout}");
    let (code, stdout, _) = cli(&["reference", "--config", cfg_arg]);
    assert_eq!(code, 0);
    assert!(stdout.contains("cached"));
    let (code, stdout, _) = cli(&["generate", "--config", cfg_arg, "--seed", "9", "--out", dir.path().join("g").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 2);

    // A tampered trace no longer matches its regeneration.
    let manifest = load_manifest(&out).unwrap();
    let victim = out.join(&manifest.cells[0].csv);
    let text = fs::read_to_string(&victim).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    fs::write(&victim, lines.join("\n") + "\n").unwrap();
    let (code, stdout, _) = cli(&["check", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 4, "{stdout}");

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "seed = 1\nplots = true\n").unwrap();
    let (code, _, stderr) = cli(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 2"), "{stderr}");

    let diverging = dir.path().join("div.toml");
    fs::write(
        &diverging,
        format!(
            "seed = 1\nout = {:?}\n[[problem]]\nspec = {{ kind = \"quadratic\", n = 5, condition = 10.0 }}\n[[rule]]\nrule = \"fixed\"\nalpha = 100.0\n[run]\nmax_iter = 5000\n",
            dir.path().join("div").to_str().unwrap()
        ),
    )
    .unwrap();
    let (code, stdout, _) = cli(&["run", "--config", diverging.to_str().unwrap()]);
    assert_eq!(code, 3, "{stdout}");

    let (code, _, _) = cli(&["check", "--out", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(code, 1);
    let (code, _, _) = cli(&["run", "--desk-scale", "--paper-scale"]);
    assert_eq!(code, 2);
    let (code, _, _) = cli(&["frobnicate"]);
    assert_eq!(code, 2);
}
