//! Continuous-time contact process simulation.
//!
//! Infected vertices recover at rate 1 and infect each susceptible
//! neighbour slot at rate `lambda`; a pair joined by `m` parallel edges sees
//! rate `m * lambda`, and self-loops carry no infection pressure.

mod engine;
mod fenwick;
mod observe;
mod star;

pub use engine::{first_infection_time_of, simulate, simulate_observed, CpState, AUDIT_INTERVAL};
pub use observe::{NoObserver, Observer, TrajectorySampler, VertexWatch};
pub use star::{
    exact_star_mean_extinction, exact_star_mean_extinction_all, simulate_star, simulate_star_observed,
    StarState, STAR_ORACLE_CAP,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// When a run stops. `FirstOf` stops on whichever member fires first; ties
/// at the same instant resolve in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCondition {
    Extinction,
    TimeHorizon(f64),
    VertexInfected(usize),
    InfectedCountAtLeast(usize),
    InfectedCountAtMost(usize),
    /// Star runs only: infected leaf count `>= m`.
    LeavesAtLeast(usize),
    /// Star runs only: infected leaf count `<= m`.
    LeavesAtMost(usize),
    FirstOf(Vec<StopCondition>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Extinction,
    TimeHorizon,
    VertexInfected,
    InfectedCountAtLeast,
    InfectedCountAtMost,
    LeavesAtLeast,
    LeavesAtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub stop_reason: StopReason,
    pub stop_time: f64,
    pub n_events: u64,
    pub final_infected: usize,
    /// The horizon cut the run short while another condition was pending.
    pub censored: bool,
}

/// A [`SimOutcome`] tagged with the stream that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    #[serde(flatten)]
    pub outcome: SimOutcome,
    pub seed: u64,
    pub replica: u64,
}

/// A stop condition flattened into atomic tests plus one horizon.
#[derive(Debug, Clone)]
pub(crate) struct CompiledStop {
    pub horizon: f64,
    pub tests: Vec<Atom>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Atom {
    Extinction,
    Vertex(usize),
    AtLeast(usize),
    AtMost(usize),
    LeavesAtLeast(usize),
    LeavesAtMost(usize),
}

impl Atom {
    pub fn reason(self) -> StopReason {
        match self {
            Atom::Extinction => StopReason::Extinction,
            Atom::Vertex(_) => StopReason::VertexInfected,
            Atom::AtLeast(_) => StopReason::InfectedCountAtLeast,
            Atom::AtMost(_) => StopReason::InfectedCountAtMost,
            Atom::LeavesAtLeast(_) => StopReason::LeavesAtLeast,
            Atom::LeavesAtMost(_) => StopReason::LeavesAtMost,
        }
    }
}

impl CompiledStop {
    pub fn compile(stop: &StopCondition, n_vertices: usize, star: bool) -> Result<Self> {
        let mut out = CompiledStop { horizon: f64::INFINITY, tests: Vec::new() };
        out.push(stop, n_vertices, star)?;
        Ok(out)
    }

    fn push(&mut self, stop: &StopCondition, n: usize, star: bool) -> Result<()> {
        match *stop {
            StopCondition::Extinction => self.tests.push(Atom::Extinction),
            StopCondition::TimeHorizon(t) => {
                if !(t >= 0.0) {
                    return Err(Error::invalid(format!("time horizon must be >= 0, got {t}")));
                }
                self.horizon = self.horizon.min(t);
            }
            StopCondition::VertexInfected(v) => {
                if v >= n {
                    return Err(Error::invalid(format!("stop vertex {v} out of range ({n} vertices)")));
                }
                if star && v != 0 {
                    return Err(Error::invalid(
                        "the reduced star chain tracks only the centre (vertex 0) individually",
                    ));
                }
                self.tests.push(Atom::Vertex(v));
            }
            StopCondition::InfectedCountAtLeast(m) => {
                if m > n {
                    return Err(Error::invalid(format!("count threshold {m} exceeds {n} vertices")));
                }
                self.tests.push(Atom::AtLeast(m));
            }
            StopCondition::InfectedCountAtMost(m) => self.tests.push(Atom::AtMost(m)),
            StopCondition::LeavesAtLeast(m) | StopCondition::LeavesAtMost(m) => {
                if !star {
                    return Err(Error::invalid("leaf-count stop conditions apply to star runs only"));
                }
                if m > n - 1 {
                    return Err(Error::invalid(format!("leaf threshold {m} exceeds {} leaves", n - 1)));
                }
                self.tests.push(match stop {
                    StopCondition::LeavesAtLeast(_) => Atom::LeavesAtLeast(m),
                    _ => Atom::LeavesAtMost(m),
                });
            }
            StopCondition::FirstOf(ref list) => {
                for s in list {
                    self.push(s, n, star)?;
                }
            }
        }
        Ok(())
    }

    /// Whether a horizon stop counts as censoring.
    pub fn censors(&self) -> bool {
        !self.tests.is_empty()
    }
}
