use thiserror::Error;

/// Errors produced by the rate evaluators and their numerical machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entry {index} is not finite")]
    NonFiniteEntry { index: usize },

    #[error("I + M is not positive definite: eigenvalue {eigenvalue} of M is <= -1")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("objective is not finite at x = {x}")]
    NonFiniteObjective { x: f64 },

    #[error("root is not bracketed: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    Bracket { g_lo: f64, g_hi: f64 },

    #[error("invalid search interval [{lo}, {hi}] with tolerance {tol}")]
    InvalidInterval { lo: f64, hi: f64, tol: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("iterative waterfilling did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("{failed} of {total} Monte Carlo samples failed (first failure: {first})")]
    TooManyFailures { failed: usize, total: usize, first: String },
}

pub type Result<T> = std::result::Result<T, Error>;
