use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One checked precondition of a bound, kept in the audit trail of every
/// [`BoundResult`](crate::bounds::BoundResult).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok" } else { "FAILED" };
        write!(f, "{} [{}]: {}", self.name, status, self.detail)
    }
}

fn join_failed(checks: &[Check]) -> String {
    checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("increment law has nonnegative drift: E[X] = {mean}")]
    NonNegativeDrift { mean: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("moment of order {order} does not exist (tail index {tail_index})")]
    MomentDoesNotExist { order: f64, tail_index: f64 },

    #[error("invalid moment order t = {t}: {reason}")]
    InvalidOrder { t: f64, reason: &'static str },

    #[error("variance is infinite")]
    InfiniteVariance,

    #[error("precondition violated: {}", join_failed(.0))]
    ValidityViolation(Vec<Check>),

    #[error("rate h = {h} not certified: E[exp(hX), X <= y] = {mgf} > 1")]
    RateNotCertified { h: f64, mgf: f64 },

    #[error("walk did not reach its stopping level within {steps} steps")]
    StepLimitExceeded { steps: u64 },
}

impl Error {
    /// Validation-class errors map to exit code 2 in the CLI.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::StepLimitExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
