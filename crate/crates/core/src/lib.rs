//! Adaptive gradient and proximal-gradient methods that need no linesearch,
//! with the baselines they are compared against, the projections used by the
//! benchmark problems, and certificate checks evaluated along recorded runs.

pub mod accounting;
pub mod diagnostics;
pub mod error;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
pub use problem::{CompositeProblem, Point, ProxFriendly, ReferenceSolution, SmoothFunction};
