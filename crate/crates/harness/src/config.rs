//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 1
//! scale = "desk"          # or "paper"
//! out = "results"
//! plot = true
//! parallel = false
//! stop_at_target = false  # stop runs at the reference target accuracy
//!
//! [run]                   # solver settings shared by every cell
//! max_iter = 2000
//! grad_tol = 1e-10
//!
//! [[problem]]
//! benchmark = "mle"       # one of mle, lrmc, min_curve, nmf, dual_entropy
//!
//! [[problem]]
//! spec = { kind = "quadratic", n = 20, condition = 100.0 }
//! seed = 7                # optional per-problem seed
//!
//! [[rule]]
//! rule = "adgd2"          # alias "adproxgd"
//!
//! [[rule]]
//! rule = "armijo"
//! s = 1.2
//! r = 0.5
//! ```
//!
//! Omitting every `[[problem]]` selects the five benchmarks at `scale`;
//! omitting every `[[rule]]` selects the adaptive method plus the nine Armijo pairs.

use std::path::{Path, PathBuf};

use adgd_core::problems::{Benchmark, InstanceDescriptor, ProblemSpec, Scale};
use adgd_core::solver::{RunConfig, StepRule};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub plot: bool,
    /// Run independent (problem, rule) cells on the rayon pool.
    #[serde(default)]
    pub parallel: bool,
    /// Stop each run once F reaches the reference target for its problem.
    #[serde(default)]
    pub stop_at_target: bool,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub reference: ReferenceConfig,
    #[serde(default, rename = "problem")]
    pub problems: Vec<ProblemEntry>,
    #[serde(default, rename = "rule")]
    pub rules: Vec<StepRule>,
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

/// One problem row: either a named benchmark at the configured scale or an explicit spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<Benchmark>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ProblemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Settings for the high-accuracy reference runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceConfig {
    pub enabled: bool,
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations per restart segment; a segment that no longer lowers F ends the run.
    pub chunk: usize,
    /// Restarts for nonconvex problems.
    pub restarts: usize,
    /// Cache directory; defaults to `<out>/references`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig {
            enabled: true,
            tol: 1e-12,
            max_iter: 1_000_000,
            chunk: 5000,
            restarts: 10,
            cache: None,
        }
    }
}

impl ExperimentConfig {
    /// A config running `rules` (default matrix when empty) on every benchmark.
    pub fn benchmarks(seed: u64, scale: Scale, out: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            seed,
            scale,
            out: out.into(),
            plot: false,
            parallel: false,
            stop_at_target: false,
            run: RunConfig::default(),
            reference: ReferenceConfig::default(),
            problems: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config {
            origin: origin.into(),
            message: e.to_string().trim_end().to_string(),
        })?;
        cfg.validate(origin)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn validate(&self, origin: &str) -> Result<()> {
        let bad = |message: String| {
            Err(HarnessError::Config {
                origin: origin.into(),
                message,
            })
        };
        for (i, p) in self.problems.iter().enumerate() {
            if p.benchmark.is_some() == p.spec.is_some() {
                return bad(format!("problem[{i}]: give exactly one of `benchmark` or `spec`"));
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if let Err(e) = r.validate() {
                return bad(format!("rule[{i}]: {e}"));
            }
        }
        if let Err(e) = self.run.validate() {
            return bad(format!("run: {e}"));
        }
        let r = &self.reference;
        if !(r.tol > 0.0) || r.max_iter == 0 || r.chunk == 0 || r.restarts == 0 {
            return bad("reference: tol, max_iter, chunk and restarts must be positive".into());
        }
        Ok(())
    }

    /// The problems to run, in config order.
    pub fn descriptors(&self) -> Vec<InstanceDescriptor> {
        if self.problems.is_empty() {
            return Benchmark::ALL
                .into_iter()
                .map(|b| InstanceDescriptor {
                    seed: self.seed,
                    spec: ProblemSpec::benchmark(b, self.scale),
                })
                .collect();
        }
        self.problems
            .iter()
            .map(|p| InstanceDescriptor {
                seed: p.seed.unwrap_or(self.seed),
                spec: match (&p.benchmark, &p.spec) {
                    (Some(b), _) => ProblemSpec::benchmark(*b, self.scale),
                    (None, Some(s)) => s.clone(),
                    (None, None) => unreachable!("validated"),
                },
            })
            .collect()
    }

    /// The rules to run, in config order.
    pub fn rule_list(&self) -> Vec<StepRule> {
        if self.rules.is_empty() {
            return default_rules();
        }
        self.rules.clone()
    }

    pub fn reference_cache(&self) -> PathBuf {
        self.reference.cache.clone().unwrap_or_else(|| self.out.join("references"))
    }
}

/// The adaptive proximal method followed by the nine Armijo pairs.
pub fn default_rules() -> Vec<StepRule> {
    std::iter::once(StepRule::Adgd2).chain(StepRule::armijo_grid()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_default_matrix() {
        let cfg = ExperimentConfig::from_toml_str("seed = 3\n", "inline").unwrap();
        assert_eq!(cfg.descriptors().len(), 5);
        assert_eq!(cfg.rule_list().len(), 10);
        assert_eq!(cfg.out, PathBuf::from("results"));
    }

    #[test]
    fn explicit_problem_and_rules() {
        let text = r#"
seed = 1
[run]
max_iter = 50

[[problem]]
spec = { kind = "quadratic", n = 4, condition = 10.0 }
seed = 9

[[rule]]
rule = "adproxgd"

[[rule]]
rule = "armijo"
s = 1.5
r = 0.8
"#;
        let cfg = ExperimentConfig::from_toml_str(text, "inline").unwrap();
        assert_eq!(cfg.run.max_iter, 50);
        assert_eq!(cfg.descriptors()[0].seed, 9);
        assert_eq!(cfg.rule_list(), vec![StepRule::Adgd2, StepRule::Armijo { s: 1.5, r: 0.8 }]);
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        let text = "seed = 1\n\n[run]\nmax_iters = 10\n";
        let err = ExperimentConfig::from_toml_str(text, "inline").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 4"), "{msg}");
        assert!(msg.contains("max_iters"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn ambiguous_problem_entry_is_rejected() {
        let text = "seed = 1\n[[problem]]\nbenchmark = \"nmf\"\nspec = { kind = \"quartic\", start = 1.0 }\n";
        assert!(ExperimentConfig::from_toml_str(text, "inline").is_err());
        assert!(ExperimentConfig::from_toml_str("seed = 1\n[[problem]]\n", "inline").is_err());
    }

    #[test]
    fn invalid_rule_parameters_are_config_errors() {
        let text = "seed = 1\n[[rule]]\nrule = \"armijo\"\ns = 0.5\nr = 0.5\n";
        let err = ExperimentConfig::from_toml_str(text, "inline").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = ExperimentConfig::benchmarks(4, Scale::Paper, "x");
        cfg.rules = vec![StepRule::Armijo { s: 1.1, r: 0.9 }];
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string(), "inline").unwrap();
        assert_eq!(back, cfg);
    }
}
