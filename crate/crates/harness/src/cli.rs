//! The `adgd` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use adgd_core::problems::Scale;
use clap::{Args, Parser, Subcommand};

use crate::check::check_experiment;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{generate, load_manifest, run_experiment};
use crate::plot::plot_experiment;
use crate::reference::{make_reference, CacheStatus};

#[derive(Debug, Parser)]
#[command(name = "adgd", version, about = "Adaptive gradient methods: experiments, certificates and plots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the configured problem instances and write their descriptors.
    Generate(Common),
    /// Run the (problem x rule) matrix and write traces, summary and plots.
    Run {
        #[command(flatten)]
        common: Common,
        /// Run the certificate suite afterwards; exit 4 if any check fails.
        #[arg(long)]
        check: bool,
    },
    /// Re-run stored cells with iterates recorded and check every certificate.
    Check(Common),
    /// Redraw the gap plots from stored CSVs.
    Plot(Common),
    /// Compute (or load cached) reference solutions.
    Reference(Common),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Experiment config (TOML). Without it the five benchmarks and the default rule matrix are used.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Use desk-scale problem sizes.
    #[arg(long, conflicts_with = "paper_scale")]
    pub desk_scale: bool,
    /// Use the larger published problem sizes.
    #[arg(long)]
    pub paper_scale: bool,
}

impl Common {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::benchmarks(1, Scale::Desk, "results"),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if self.desk_scale {
            cfg.scale = Scale::Desk;
        }
        if self.paper_scale {
            cfg.scale = Scale::Paper;
        }
        Ok(cfg)
    }

    fn out_dir(&self) -> Result<PathBuf> {
        match (&self.out, &self.config) {
            (Some(o), _) => Ok(o.clone()),
            (None, Some(_)) => Ok(self.resolve()?.out),
            (None, None) => Ok(PathBuf::from("results")),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    let say = |out: &mut dyn Write, s: String| {
        let _ = writeln!(out, "{s}");
    };
    match cmd {
        Command::Generate(c) => {
            let cfg = c.resolve()?;
            for (inst, path) in generate(&cfg)? {
                say(out, format!("{} (dim {}) -> {}", inst.spec.slug(), inst.x0.len(), path.display()));
            }
            Ok(0)
        }
        Command::Run { common, check } => {
            let cfg = common.resolve()?;
            let outcome = run_experiment(&cfg)?;
            say(out, crate::experiment::summary_table(&outcome.manifest.cells));
            say(out, format!("summary: {}", outcome.summary_path.display()));
            for p in &outcome.plots {
                say(out, format!("plot: {}", p.display()));
            }
            let failed = outcome.failed_cells();
            if !failed.is_empty() {
                for c in failed {
                    say(out, format!("{}/{}: {}", c.problem, c.rule, c.status));
                }
                return Ok(3);
            }
            if *check {
                return report_check(&cfg.out, out);
            }
            Ok(0)
        }
        Command::Check(c) => report_check(&c.out_dir()?, out),
        Command::Plot(c) => {
            let dir = c.out_dir()?;
            let manifest = load_manifest(&dir)?;
            for p in plot_experiment(&dir, &manifest)? {
                say(out, format!("plot: {}", p.display()));
            }
            Ok(0)
        }
        Command::Reference(c) => {
            let cfg = c.resolve()?;
            let cache = cfg.reference_cache();
            for d in cfg.descriptors() {
                let inst = d.build()?;
                let (rec, status) = make_reference(&inst, &cfg.reference, &cache)?;
                let r = &rec.reference;
                say(
                    out,
                    format!(
                        "{}: F* = {:.15e} (tolerance {:.1e}{}{}) [{}] {}",
                        d.spec.slug(),
                        r.f_star,
                        r.tolerance,
                        if r.low_confidence { ", low confidence" } else { "" },
                        if rec.best_found { ", best-found" } else { "" },
                        if status == CacheStatus::Hit { "cached" } else { "computed" },
                        r.provenance
                    ),
                );
            }
            Ok(0)
        }
    }
}

fn report_check(dir: &std::path::Path, out: &mut dyn Write) -> Result<i32> {
    let outcome = check_experiment(dir)?;
    let _ = write!(out, "{}", outcome.to_text());
    if outcome.passed() {
        Ok(0)
    } else {
        Err(HarnessError::Diagnostics(format!(
            "{} of {} cells failed",
            outcome.cells.iter().filter(|c| !c.passed()).count(),
            outcome.cells.len()
        )))
    }
}
