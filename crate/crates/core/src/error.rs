use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Model or argument violates a precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("basis dimension {product} exceeds limit {limit}")]
    Capacity { product: u128, limit: u128 },

    #[error(
        "coherent amplitude on mode {mode} leaks {tail:.3e} outside cap {cap}; cap {required_cap} required"
    )]
    Truncation {
        mode: usize,
        cap: u32,
        tail: f64,
        required_cap: u32,
    },

    #[error("no critical state for this split: residual {residual:.6e} exceeds tolerance {tolerance:.6e}")]
    Infeasible { residual: f64, tolerance: f64 },

    #[error("exhaustive split search limited to {limit} neurons, model has {n}; pass an explicit split")]
    SearchSpace { n: usize, limit: usize },

    #[error("enumeration of {requested} patterns exceeds limit {limit}; request lazy enumeration")]
    EnumerationLimit { requested: u128, limit: u128 },

    #[error("norm drift {drift:.3e} per unit time at t={time} exceeds {limit:.1e}")]
    NormDrift { time: f64, drift: f64, limit: f64 },

    #[error("step size underflow at t={time}; last stable step {last_stable_step:.3e}")]
    StepUnderflow { time: f64, last_stable_step: f64 },

    #[error("model file: {0}")]
    Format(String),
}

/// Broad failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
    Capacity,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Invalid(_) | Error::DimensionMismatch { .. } | Error::Format(_) => ErrorClass::Validation,
            Error::Infeasible { .. } | Error::NormDrift { .. } | Error::StepUnderflow { .. } => {
                ErrorClass::Numerical
            }
            Error::Capacity { .. }
            | Error::Truncation { .. }
            | Error::SearchSpace { .. }
            | Error::EnumerationLimit { .. } => ErrorClass::Capacity,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub(crate) fn check_len(expected: usize, actual: usize, context: &'static str) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual, context })
    }
}
