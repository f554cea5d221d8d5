//! Operation counters and the per-problem "essential operation" metric.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{CostModel, EssentialMetric, ProxCost};

/// Cumulative operation counts along one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub grad_evals: u64,
    pub func_evals: u64,
    pub prox_evals: u64,
    pub svd_count: u64,
    pub eig_count: u64,
    pub projection_count: u64,
    /// Function evaluations whose products are reused by the next gradient.
    pub reused_evals: u64,
}

/// One operation performed by a solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpEvent {
    Gradient,
    Value,
    /// The most recent `Value` can be reused by the next gradient.
    Reuse,
    Prox,
}

impl OpEvent {
    pub fn name(self) -> &'static str {
        match self {
            OpEvent::Gradient => "grad",
            OpEvent::Value => "func",
            OpEvent::Reuse => "reuse",
            OpEvent::Prox => "prox",
        }
    }
}

impl fmt::Display for OpEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpEvent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "grad" => Ok(OpEvent::Gradient),
            "func" => Ok(OpEvent::Value),
            "reuse" => Ok(OpEvent::Reuse),
            "prox" => Ok(OpEvent::Prox),
            other => Err(Error::InvalidParameter(format!("unknown event kind '{other}'"))),
        }
    }
}

impl Counters {
    pub fn record(&mut self, event: OpEvent, cost: &CostModel) {
        match event {
            OpEvent::Gradient => self.grad_evals += 1,
            OpEvent::Value => self.func_evals += 1,
            OpEvent::Reuse => {
                if self.reused_evals < self.func_evals {
                    self.reused_evals += 1;
                }
            }
            OpEvent::Prox => {
                self.prox_evals += 1;
                match cost.prox {
                    ProxCost::Free => {}
                    ProxCost::Projection => self.projection_count += 1,
                    ProxCost::Svd => self.svd_count += 1,
                    ProxCost::Eigendecomposition => self.eig_count += 1,
                }
            }
        }
    }

    /// The quantity compared across methods for this problem.
    pub fn essential(&self, metric: EssentialMetric) -> u64 {
        match metric {
            EssentialMetric::Products {
                grad_units,
                value_units,
            } => grad_units * self.grad_evals + value_units * (self.func_evals - self.reused_evals),
            EssentialMetric::Projections => self.projection_count,
            EssentialMetric::Svds => self.svd_count,
            EssentialMetric::Eigendecompositions => self.eig_count,
        }
    }

    /// Componentwise `self >= earlier`.
    pub fn dominates(&self, earlier: &Counters) -> bool {
        self.grad_evals >= earlier.grad_evals
            && self.func_evals >= earlier.func_evals
            && self.prox_evals >= earlier.prox_evals
            && self.svd_count >= earlier.svd_count
            && self.eig_count >= earlier.eig_count
            && self.projection_count >= earlier.projection_count
            && self.reused_evals >= earlier.reused_evals
    }
}

/// Replays an event stream under a problem's cost model.
pub fn count_essential<I, E>(cost: &CostModel, events: I) -> Result<Counters>
where
    I: IntoIterator<Item = E>,
    E: AsRef<str>,
{
    let mut c = Counters::default();
    for e in events {
        c.record(e.as_ref().parse()?, cost);
    }
    Ok(c)
}

impl EssentialMetric {
    pub fn describe(self) -> String {
        match self {
            EssentialMetric::Products {
                grad_units,
                value_units,
            } => format!("products ({grad_units} per gradient, {value_units} per non-reused value)"),
            EssentialMetric::Projections => "projections".into(),
            EssentialMetric::Svds => "SVDs".into(),
            EssentialMetric::Eigendecompositions => "eigendecompositions".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(prox: ProxCost, essential: EssentialMetric) -> CostModel {
        CostModel { prox, essential }
    }

    #[test]
    fn factorization_armijo_iteration_with_three_trials() {
        let cost = model(
            ProxCost::Projection,
            EssentialMetric::Products {
                grad_units: 3,
                value_units: 1,
            },
        );
        let events = ["grad", "prox", "func", "prox", "func", "prox", "func", "reuse"];
        let c = count_essential(&cost, events).unwrap();
        assert_eq!(c.func_evals, 3);
        assert_eq!(c.reused_evals, 1);
        assert_eq!(c.grad_evals, 1);
        assert_eq!(c.essential(cost.essential), 3 + (3 - 1));
    }

    #[test]
    fn one_svd_per_adaptive_iteration() {
        let cost = model(ProxCost::Svd, EssentialMetric::Svds);
        let c = count_essential(&cost, ["grad", "prox"]).unwrap();
        assert_eq!(c.svd_count, 1);
        assert_eq!(c.essential(cost.essential), 1);
    }

    #[test]
    fn mle_armijo_two_trials_costs_two_eigendecompositions() {
        let cost = model(ProxCost::Eigendecomposition, EssentialMetric::Eigendecompositions);
        let c = count_essential(&cost, ["grad", "prox", "func", "prox", "func", "reuse"]).unwrap();
        assert_eq!(c.eig_count, 2);
        assert_eq!(c.projection_count, 0);
    }

    #[test]
    fn unknown_event_is_rejected() {
        let cost = CostModel::gradients();
        assert!(count_essential(&cost, ["grad", "hessian"]).is_err());
    }

    #[test]
    fn reuse_never_exceeds_function_evaluations() {
        let cost = CostModel::gradients();
        let c = count_essential(&cost, ["reuse", "reuse", "func", "reuse", "reuse"]).unwrap();
        assert_eq!(c.reused_evals, 1);
    }
}
