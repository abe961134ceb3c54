use thiserror::Error;

/// Errors reported by the solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A search ran out of its allowed budget (radius, bracket range, ...).
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("step size underflow at r = {radius:e}")]
    StepUnderflow { radius: f64 },

    /// An iterative method stopped before reaching its tolerance. `best` is
    /// the last (or best) value it produced.
    #[error("no convergence after {iterations} iterations (best value {best:e}): {context}")]
    NonConvergence {
        iterations: usize,
        best: f64,
        context: String,
    },

    /// A bisection in the crossing module failed part-way; the bracket it had
    /// established so far is kept.
    #[error("evaluation failed inside bracket [{lo}, {hi}]: {source}")]
    PartialBracket {
        lo: f64,
        hi: f64,
        source: Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
