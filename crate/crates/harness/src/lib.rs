//! Experiment harness: configs, batch runs, reference solutions, CSV traces,
//! certificate checks over stored runs, and SVG plots.

pub mod check;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod reference;
pub mod trace_csv;

pub use config::{ExperimentConfig, ProblemEntry, ReferenceConfig};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, CellSummary, ExperimentOutcome, Manifest};
