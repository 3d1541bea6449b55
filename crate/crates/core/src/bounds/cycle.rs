//! Bounds on `P(M_τ > x)` over one cycle `1 <= k <= τ_z`.

use crate::bounds::rates::{rate_t1, rates_t2, Moments, T2Regime};
use crate::bounds::{
    check_positive, inv_pow, require, BoundInputs, BoundResult, Regime, ALPHA_GRID,
};
use crate::distributions::DistributionSpec;
use crate::error::{Check, Error, Result};

/// Slack allowed when re-checking `E[e^{hX}, X <= y] <= 1` numerically.
const CERT_SLACK: f64 = 1e-12;

/// Raw value of the single-rate inequality for a rate `h` satisfying
/// `E[e^{hX}, X <= y] <= 1`:
/// `(1 + 1/(e^{hx}-1)) E[τ] P(X>y) + E[τ] a h / (e^{hx}-1)`.
pub fn lemma1_value(h: f64, x: f64, tau_mean_ub: f64, a: f64, tail_y: f64) -> f64 {
    let denom = (h * x).exp_m1();
    (1.0 + 1.0 / denom) * tau_mean_ub * tail_y + tau_mean_ub * a * h / denom
}

/// The single-rate bound for an arbitrary rate `h`, re-certifying the rate
/// condition at the truncation level `y` first.
pub fn lemma1_bound(
    spec: &DistributionSpec,
    h: f64,
    x: f64,
    y: f64,
    tau_mean_ub: f64,
) -> Result<BoundResult> {
    let a = spec.validate()?;
    let checks = require(vec![
        check_positive("h", h),
        check_positive("x", x),
        check_positive("y", y),
        check_positive("E[tau_z] bound", tau_mean_ub),
    ])?;
    let mgf = spec.mgf_truncated(h, y);
    if !(mgf <= 1.0 + CERT_SLACK) {
        return Err(Error::RateNotCertified { h, mgf });
    }
    let tail_y = spec.tail(y);
    let denom = (h * x).exp_m1();
    let first = tau_mean_ub * a * h / denom;
    let tail_term = (1.0 + 1.0 / denom) * tau_mean_ub * tail_y;
    let mut validity = checks;
    validity.push(Check::new(
        "E[exp(hX), X <= y] <= 1",
        true,
        format!("E[exp(hX), X <= y] = {mgf:.15}"),
    ));
    Ok(BoundResult::new(
        first + tail_term,
        Regime::Lemma1,
        vec![
            ("h", h),
            ("mgf_truncated", mgf),
            ("first_term", first),
            ("tail_term", tail_term),
            ("tail_y", tail_y),
            ("a", a),
            ("tau_mean_ub", tau_mean_ub),
        ],
        validity,
    ))
}

fn common_checks(inputs: &BoundInputs) -> (Vec<Check>, f64) {
    let y = inputs.y.unwrap_or(f64::NAN);
    (
        vec![
            check_positive("x", inputs.x),
            check_positive("y", y),
            check_positive("E[tau_z] bound", inputs.tau_mean_ub),
        ],
        y,
    )
}

/// Merges `own` checks with the outcome of a rate computation so that a
/// violation reports every failed inequality at once.
fn merge<T>(
    own: Vec<Check>,
    rate: Result<T>,
    rate_checks: impl Fn(&T) -> Vec<Check>,
) -> Result<(T, Vec<Check>)> {
    match rate {
        Ok(r) => {
            let mut all = own;
            all.extend(rate_checks(&r));
            let all = require(all)?;
            Ok((r, all))
        }
        Err(Error::ValidityViolation(rc)) => {
            let mut all = own;
            all.extend(rc);
            Err(Error::ValidityViolation(all))
        }
        Err(e) => {
            require(own)?;
            Err(e)
        }
    }
}

/// Single-rate cycle bound with moments of order `t ∈ (1,2]`, or its variant
/// with moments truncated at `y` when `inputs.use_truncated`.
pub fn bound_mtau_t1(spec: &DistributionSpec, inputs: &BoundInputs) -> Result<BoundResult> {
    let a = spec.validate()?;
    let (mut own, y) = common_checks(inputs);
    let x = inputs.x;
    own.push(Check::new("x >= y", x >= y, format!("x = {x}, y = {y}")));
    if !(y > 0.0) {
        return Err(Error::ValidityViolation(own));
    }
    let t = inputs.t;
    let tau = inputs.tau_mean_ub;

    let (rate, validity, tail_y) = if inputs.use_truncated {
        let tm = spec.truncated_moments(y, t)?;
        let (rate, v) = merge(
            own,
            rate_t1(
                Moments::Truncated {
                    trunc: &tm,
                    drift: a,
                },
                y,
            ),
            |r| r.checks.clone(),
        )?;
        (rate, v, tm.tail_y)
    } else {
        let prof = spec.moment_profile(t)?;
        let (rate, v) = merge(own, rate_t1(Moments::Full(&prof), y), |r| r.checks.clone())?;
        (rate, v, spec.tail(y))
    };

    let k = x / y;
    let decay = inv_pow(rate.u, k);
    // a·E[τ]·y⁻¹·ln(1+u)·u^(-x/y): the first summand with (1+u)^(x/y) - 1 >= u^(x/y).
    let first = a * tau * rate.h * decay;
    let tail_term = (1.0 + decay) * tau * tail_y;
    Ok(BoundResult::new(
        first + tail_term,
        Regime::T1,
        vec![
            ("h", rate.h),
            ("u", rate.u),
            ("x_over_y", k),
            ("first_term", first),
            ("tail_term", tail_term),
            ("tail_y", tail_y),
            ("a", a),
            ("drift_eff", rate.drift_eff),
            ("moment_eff", rate.moment_eff),
            ("tau_mean_ub", tau),
        ],
        validity,
    ))
}

/// Two-rate cycle bound for `t > 2`, dispatching between the `h₁` and `h₂`
/// regimes. With `inputs.use_truncated` the variance and `A_{t,+}` are
/// replaced by `E[X², X <= y]` and `E[X^t, 0 < X <= y]`.
pub fn bound_mtau_t2(spec: &DistributionSpec, inputs: &BoundInputs) -> Result<BoundResult> {
    let a = spec.validate()?;
    let (own, y) = common_checks(inputs);
    if !(y > 0.0) {
        return Err(Error::ValidityViolation(own));
    }
    let t = inputs.t;
    if !(t > 2.0) {
        return Err(Error::InvalidOrder {
            t,
            reason: "the two-rate bound needs t > 2",
        });
    }
    let x = inputs.x;
    let tau = inputs.tau_mean_ub;
    let (rates, validity, tail_y) = if inputs.use_truncated {
        let tm = spec.truncated_moments(y, t)?;
        let (r, v) = merge(
            own,
            rates_t2(
                Moments::Truncated {
                    trunc: &tm,
                    drift: a,
                },
                y,
                inputs.alpha,
            ),
            |_| Vec::new(),
        )?;
        (r, v, tm.tail_y)
    } else {
        let prof = spec.moment_profile(t)?;
        let (r, v) = merge(own, rates_t2(Moments::Full(&prof), y, inputs.alpha), |_| {
            Vec::new()
        })?;
        (r, v, spec.tail(y))
    };
    let mut validity = validity;
    let (regime, first, tail_term) = match rates.regime {
        T2Regime::I => {
            let denom = (rates.h1 * x).exp_m1();
            validity.push(Check::new(
                "h1 <= h2",
                true,
                format!("h1 = {:.6e}, h2 = {:.6e}", rates.h1, rates.h2),
            ));
            (
                Regime::T2i,
                a * rates.h1 * tau / denom,
                (1.0 + 1.0 / denom) * tau * tail_y,
            )
        }
        T2Regime::II => {
            let decay = inv_pow(rates.v, x / y);
            validity.push(Check::new(
                "h1 >= h2",
                true,
                format!("h1 = {:.6e}, h2 = {:.6e}", rates.h1, rates.h2),
            ));
            (
                Regime::T2ii,
                a * tau * rates.h2 * decay,
                (1.0 + decay) * tau * tail_y,
            )
        }
    };
    Ok(BoundResult::new(
        first + tail_term,
        regime,
        vec![
            ("h", rates.h()),
            ("h1", rates.h1),
            ("h2", rates.h2),
            ("v", rates.v),
            ("alpha", rates.alpha),
            ("first_term", first),
            ("tail_term", tail_term),
            ("tail_y", tail_y),
            ("a", a),
            ("tau_mean_ub", tau),
        ],
        validity,
    ))
}

/// Smallest valid two-rate bound over [`ALPHA_GRID`].
pub fn bound_mtau_t2_best_alpha(
    spec: &DistributionSpec,
    inputs: &BoundInputs,
) -> Result<BoundResult> {
    best_over_alpha(inputs, |inp| bound_mtau_t2(spec, inp))
}

pub(crate) fn best_over_alpha(
    inputs: &BoundInputs,
    eval: impl Fn(&BoundInputs) -> Result<BoundResult>,
) -> Result<BoundResult> {
    let mut best: Option<BoundResult> = None;
    let mut last_err = None;
    for alpha in ALPHA_GRID {
        match eval(&inputs.with_alpha(alpha)) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.value < b.value) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("alpha grid is nonempty"))
}
