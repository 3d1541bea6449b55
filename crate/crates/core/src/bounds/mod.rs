//! Closed-form upper bounds.
//!
//! Cycle bounds ([`lemma1_bound`], [`bound_mtau_t1`], [`bound_mtau_t2`]) bound
//! `P(M_τ > x)` given an upper bound on `E[τ_z]`, which [`tau_mean_ub`]
//! supplies through the Wald identity and an overshoot inequality. Global
//! bounds ([`bound_max_t3`], [`bound_max_series`], [`cramer_lundberg`]) bound
//! `P(M > x)`.
//!
//! Every bound is returned as a [`BoundResult`] carrying the raw value, the
//! value clamped to `[0, 1]`, the named intermediate terms and the list of
//! checked preconditions. A failed precondition is an
//! [`Error::ValidityViolation`](crate::Error::ValidityViolation) carrying the
//! same list.

mod cramer;
mod cycle;
mod global;
mod overshoot;
mod rates;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Check, Error, Result};

pub use cramer::{cramer_lundberg, lundberg_exponent};
pub use cycle::{
    bound_mtau_t1, bound_mtau_t2, bound_mtau_t2_best_alpha, lemma1_bound, lemma1_value,
};
pub use global::{bound_max_series, bound_max_t3, bound_max_t3_best_alpha, SeriesOptions};
pub use overshoot::{overshoot_ub, tau_mean_ub, OvershootMethod};
pub use rates::{rate_t1, rates_t2, Moments, RateT1, RatesT2, T2Regime};

/// Grid used when minimizing over the split parameter α.
pub const ALPHA_GRID: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80,
    0.85, 0.90, 0.95,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    T1,
    T2i,
    T2ii,
    T3i,
    T3ii,
    #[serde(rename = "series")]
    Series,
    #[serde(rename = "lemma1")]
    Lemma1,
    #[serde(rename = "cramer_lundberg")]
    CramerLundberg,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::T1 => "T1",
            Regime::T2i => "T2i",
            Regime::T2ii => "T2ii",
            Regime::T3i => "T3i",
            Regime::T3ii => "T3ii",
            Regime::Series => "series",
            Regime::Lemma1 => "lemma1",
            Regime::CramerLundberg => "cramer_lundberg",
        };
        f.write_str(s)
    }
}

/// Inputs shared by the cycle and global bounds. Fields a bound does not use
/// are ignored; fields it needs but finds unset are reported as violations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub x: f64,
    /// Stopping depth of `τ_z`.
    pub z: f64,
    /// Truncation level for cycle bounds.
    pub y: Option<f64>,
    /// `θ ∈ (0,1)` for global bounds; the truncation level becomes `θ x`.
    pub theta: Option<f64>,
    /// Moment order.
    pub t: f64,
    /// `α ∈ (0,1)`, with `β = 1 - α`.
    pub alpha: f64,
    /// Upper bound on `E[τ_z]`.
    pub tau_mean_ub: f64,
    /// Use moments truncated at the level `y` instead of full moments.
    pub use_truncated: bool,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs {
            x: f64::NAN,
            z: f64::NAN,
            y: None,
            theta: None,
            t: 2.0,
            alpha: 0.5,
            tau_mean_ub: f64::NAN,
            use_truncated: false,
        }
    }
}

impl BoundInputs {
    pub fn cycle(x: f64, y: f64, t: f64, tau_mean_ub: f64) -> Self {
        BoundInputs {
            x,
            y: Some(y),
            t,
            tau_mean_ub,
            ..Default::default()
        }
    }

    pub fn global(x: f64, z: f64, theta: f64, t: f64, tau_mean_ub: f64) -> Self {
        BoundInputs {
            x,
            z,
            theta: Some(theta),
            t,
            tau_mean_ub,
            ..Default::default()
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn truncated(mut self, on: bool) -> Self {
        self.use_truncated = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub value_clamped: f64,
    pub regime: Regime,
    pub terms: BTreeMap<String, f64>,
    pub validity: Vec<Check>,
}

impl BoundResult {
    pub(crate) fn new(
        value: f64,
        regime: Regime,
        terms: Vec<(&str, f64)>,
        validity: Vec<Check>,
    ) -> Self {
        let value = if value.is_nan() {
            f64::INFINITY
        } else {
            value.max(0.0)
        };
        BoundResult {
            value,
            value_clamped: value.min(1.0),
            regime,
            terms: terms.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            validity,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.get(name).copied()
    }

    pub fn is_valid(&self) -> bool {
        self.validity.iter().all(|c| c.passed)
    }
}

/// Fails with the whole list when any check failed.
pub(crate) fn require(checks: Vec<Check>) -> Result<Vec<Check>> {
    if checks.iter().all(|c| c.passed) {
        Ok(checks)
    } else {
        Err(Error::ValidityViolation(checks))
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Check {
    Check::new(
        format!("{name} > 0"),
        v.is_finite() && v > 0.0,
        format!("{name} = {v}"),
    )
}

/// `u^(-k)` evaluated in log-space.
pub(crate) fn inv_pow(u: f64, k: f64) -> f64 {
    (-k * u.ln()).exp()
}

pub(crate) fn unit_interval(name: &str, v: Option<f64>) -> Check {
    match v {
        Some(v) => Check::new(
            format!("{name} in (0,1)"),
            v > 0.0 && v < 1.0,
            format!("{name} = {v}"),
        ),
        None => Check::new(format!("{name} in (0,1)"), false, format!("{name} not set")),
    }
}
