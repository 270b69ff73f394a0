use thiserror::Error;

/// Errors raised by generators, simulators, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative method ran out of iterations.
    #[error("no convergence after {iterations} iterations (last estimate {last_estimate}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        last_estimate: f64,
        residual: f64,
    },

    /// A linear system or state space is larger than the solver accepts.
    #[error("dimension {requested} exceeds cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    /// A bracketing search could not bracket its target.
    #[error("search interval does not bracket the target: {0}")]
    NonBracketing(String),

    /// The incremental rate bookkeeping disagreed with a from-scratch recount.
    #[error("rate bookkeeping drift: incremental {incremental}, recomputed {recomputed}")]
    RateDrift { incremental: u64, recomputed: u64 },

    #[error("singular linear system")]
    Singular,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad input values rather than by a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Config(_) | Error::Parse(_) | Error::DimensionCap { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
