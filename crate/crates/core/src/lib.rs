//! Multi-objective optimization with surrogate models.
//!
//! The crate provides a sequential model-based optimizer ([`flash`]) that fits
//! one regression tree per objective and evaluates the most promising
//! candidate each round, alongside two baselines ([`sway`], [`nsga2`]), a
//! generator for next-release planning problems ([`monrp`]), quality
//! indicators ([`metrics`]), domination-tree summaries ([`domtree`]) and
//! result ranking ([`stats`]).

pub mod cart;
pub mod dominance;
pub mod domtree;
mod error;
pub mod experiment;
pub mod flash;
pub mod metrics;
pub mod monrp;
pub mod nsga2;
pub mod problem;
mod run;
pub mod stats;
pub mod sway;
pub mod synth;

pub use error::{Error, Result};
pub use problem::{
    load_tabular, parse_tabular, seeded_rng, DecisionPoint, EvaluatedPoint, Generator, ObjectiveSchema,
    ObjectiveVector, Problem, ProblemKind, Sense,
};
pub use run::{RunResult, TraceRecord};
