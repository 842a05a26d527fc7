//! Error type shared by all analytical evaluators.

use std::fmt;

/// Errors produced by the channel models and special-function evaluators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates a documented precondition.
    InvalidParameter(String),
    /// The modulation scheme is not defined for the requested detection type.
    IncompatibleModulation(String),
    /// No vertical contour separates the two pole families of a
    /// Mellin-Barnes integrand.
    PoleSeparation(String),
    /// Adaptive integration failed to reach its tolerance within budget.
    Convergence(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::IncompatibleModulation(msg) => {
                write!(f, "incompatible modulation/detection: {msg}")
            }
            Error::PoleSeparation(msg) => write!(f, "contour infeasible: {msg}"),
            Error::Convergence(msg) => write!(f, "no convergence: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
