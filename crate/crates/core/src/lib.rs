//! Contact-process simulation on stars, Galton-Watson trees and
//! configuration-model graphs, with exact oracles for the reduced star
//! chains and closed-form survival and hitting bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod chain;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod linalg;
pub mod rng;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{DegreeDistribution, Graph, OffspringDistribution};
pub use sim::{SimOutcome, SimRecord, StarState, StopCondition, StopReason};
