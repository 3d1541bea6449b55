use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::bounds::require;
use crate::distributions::{MomentProfile, TruncatedMoments};
use crate::error::{invalid, Check, Error, Result};

/// Moment input of the rate formulas: full moments, or moments truncated at
/// the level `y` together with the full drift `a`.
#[derive(Debug, Clone, Copy)]
pub enum Moments<'a> {
    Full(&'a MomentProfile),
    Truncated {
        trunc: &'a TruncatedMoments,
        drift: f64,
    },
}

impl Moments<'_> {
    pub fn t(&self) -> f64 {
        match self {
            Moments::Full(p) => p.t,
            Moments::Truncated { trunc, .. } => trunc.t,
        }
    }

    pub fn drift(&self) -> f64 {
        match self {
            Moments::Full(p) => p.a,
            Moments::Truncated { drift, .. } => *drift,
        }
    }
}

/// Rate `h₀` for the cycle bound with moments of order `t ∈ (1,2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateT1 {
    pub h: f64,
    /// `a_eff · y^(t-1) / A_eff`, so that `h = ln(1 + u) / y`.
    pub u: f64,
    /// Drift entering `u`: `a`, or `|E[X, |X| <= y]|` on the truncated path.
    pub drift_eff: f64,
    /// Moment entering `u`: `A_t`, or `E[|X|^t, |X| <= y]`.
    pub moment_eff: f64,
    pub checks: Vec<Check>,
}

pub fn rate_t1(moments: Moments<'_>, y: f64) -> Result<RateT1> {
    let t = moments.t();
    if !(t > 1.0 && t <= 2.0) {
        return Err(Error::InvalidOrder {
            t,
            reason: "the single-rate bound needs t in (1, 2]",
        });
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(invalid(format!(
            "truncation level y must be positive, got {y}"
        )));
    }
    let (drift_eff, moment_eff, checks) = match moments {
        Moments::Full(p) => {
            let need = (E - 1.0) * p.a_t / p.a;
            let have = y.powf(t - 1.0);
            let check = Check::new(
                "y^(t-1) >= (e-1) A_t / a",
                have >= need,
                format!("y^(t-1) = {have:.6e}, (e-1) A_t / a = {need:.6e}"),
            );
            (p.a, p.a_t, vec![check])
        }
        Moments::Truncated { trunc, .. } => {
            if trunc.y != y {
                return Err(invalid(format!(
                    "truncated moments computed at y = {} but rate requested at y = {y}",
                    trunc.y
                )));
            }
            let check = Check::new(
                "E[X, |X| <= y] < 0",
                trunc.mean_trunc < 0.0 && trunc.a_t_trunc > 0.0,
                format!("E[X, |X| <= y] = {:.6e}", trunc.mean_trunc),
            );
            (-trunc.mean_trunc, trunc.a_t_trunc, vec![check])
        }
    };
    let checks = require(checks)?;
    let u = drift_eff * y.powf(t - 1.0) / moment_eff;
    let h = u.ln_1p() / y;
    Ok(RateT1 {
        h,
        u,
        drift_eff,
        moment_eff,
        checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum T2Regime {
    /// `h₁ <= h₂`: the rate `h₁` is used.
    I,
    /// `h₁ >= h₂`: the rate `h₂` is used.
    II,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesT2 {
    /// `2 α a / (e^t Var(X))`
    pub h1: f64,
    /// `ln(1 + v) / y`
    pub h2: f64,
    /// `β a y^(t-1) / A_{t,+}`
    pub v: f64,
    pub regime: T2Regime,
    pub alpha: f64,
    /// Second-moment input used in `h₁` (the variance, or `E[X², X <= y]`).
    pub second_moment: f64,
    /// Positive-part moment used in `h₂`.
    pub a_plus: f64,
}

impl RatesT2 {
    pub fn h(&self) -> f64 {
        match self.regime {
            T2Regime::I => self.h1,
            T2Regime::II => self.h2,
        }
    }
}

/// Rates `h₁`, `h₂` for moments of order `t > 2` and the split `α + β = 1`.
pub fn rates_t2(moments: Moments<'_>, y: f64, alpha: f64) -> Result<RatesT2> {
    let t = moments.t();
    if !(t > 2.0) {
        return Err(Error::InvalidOrder {
            t,
            reason: "the two-rate bound needs t > 2",
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(invalid(format!(
            "truncation level y must be positive, got {y}"
        )));
    }
    let a = moments.drift();
    let (second_moment, a_plus) = match moments {
        Moments::Full(p) => (p.var.finite().ok_or(Error::InfiniteVariance)?, p.a_t_plus),
        Moments::Truncated { trunc, .. } => {
            if trunc.y != y {
                return Err(invalid(format!(
                    "truncated moments computed at y = {} but rates requested at y = {y}",
                    trunc.y
                )));
            }
            (trunc.b2, trunc.a_t_plus_trunc)
        }
    };
    let beta = 1.0 - alpha;
    let h1 = 2.0 * alpha * a / (t.exp() * second_moment);
    let v = beta * a * y.powf(t - 1.0) / a_plus;
    let h2 = if v.is_finite() {
        v.ln_1p() / y
    } else {
        f64::INFINITY
    };
    let regime = if h1 <= h2 { T2Regime::I } else { T2Regime::II };
    Ok(RatesT2 {
        h1,
        h2,
        v,
        regime,
        alpha,
        second_moment,
        a_plus,
    })
}
