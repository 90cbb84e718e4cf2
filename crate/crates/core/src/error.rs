use std::fmt;

use crate::closed_forms::RegimeTag;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A branch space or parameter family is malformed.
    #[error("invalid branch space: {0}")]
    InvalidSpace(String),

    /// An argument lies outside the domain of a closed-form expression.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is only defined for some regimes of (alpha, gamma).
    #[error("regime mismatch: expected {expected}, found {found:?}")]
    RegimeMismatch { expected: &'static str, found: RegimeTag },

    /// Adaptive quadrature could not reach its error target.
    #[error("quadrature failed: error estimate {error:e} above target {target:e} after {subdivisions} subdivisions")]
    QuadratureFailure {
        error: f64,
        target: f64,
        subdivisions: usize,
    },

    /// Simulation controls are invalid (nonpositive step, horizon, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A time query lies beyond the simulated horizon.
    #[error("time {time} is outside the path horizon [0, {horizon}]")]
    OutOfRange { time: f64, horizon: f64 },

    /// A statistical test received an empty sample.
    #[error("empty sample")]
    EmptySample,

    /// A Monte Carlo functional produced NaN or an infinity.
    #[error("non-finite functional value {value} on trajectory {index}")]
    NonFiniteSample { index: u64, value: f64 },

    /// Reading or writing an experiment artifact failed.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
