//! Bounds on `P(M > x)` for the global maximum.
//!
//! Both routes start from `P(M > x) <= Σ_{j>=0} P(M_τ > x + j z)` with the
//! truncation level `θ (x + j z)` in the j-th cycle bound. The closed forms
//! majorize the sum by an integral; the series evaluates the first terms and
//! replaces the remainder by the same integral estimate.

use std::f64::consts::E;

use crate::bounds::cycle::{best_over_alpha, bound_mtau_t1, bound_mtau_t2};
use crate::bounds::rates::{rates_t2, Moments, T2Regime};
use crate::bounds::{
    check_positive, inv_pow, require, unit_interval, BoundInputs, BoundResult, Regime,
};
use crate::distributions::DistributionSpec;
use crate::error::{invalid, Check, Error, Result};

fn global_checks(inputs: &BoundInputs) -> (Vec<Check>, f64) {
    let theta = inputs.theta.unwrap_or(f64::NAN);
    (
        vec![
            check_positive("x", inputs.x),
            check_positive("z", inputs.z),
            unit_interval("theta", inputs.theta),
            check_positive("E[tau_z] bound", inputs.tau_mean_ub),
        ],
        theta,
    )
}

/// `ψ(s) = ln(1+s) - (t-1) s/(1+s)`; `ψ(v(y)) >= 0` means `h₂(y)` is
/// nonincreasing from `y` on.
fn h2_nonincreasing(v: f64, t: f64) -> bool {
    v.ln_1p() - (t - 1.0) * v / (1.0 + v) >= 0.0
}

/// Closed-form global bound. Case (i) for `t ∈ (1,2]` with full moments
/// `A_t`; case (ii) for `t > 2` with `Var(X)` and `A_{t,+}`.
pub fn bound_max_t3(spec: &DistributionSpec, inputs: &BoundInputs) -> Result<BoundResult> {
    let a = spec.validate()?;
    if inputs.use_truncated {
        return Err(invalid(
            "the closed-form global bound uses full moments only",
        ));
    }
    let (mut checks, theta) = global_checks(inputs);
    let t = inputs.t;
    if !(t > 1.0) {
        return Err(Error::InvalidOrder {
            t,
            reason: "moment order must exceed 1",
        });
    }
    if !(theta > 0.0 && theta < 1.0 && inputs.x > 0.0) {
        return Err(Error::ValidityViolation(checks));
    }
    let (x, z, tau) = (inputs.x, inputs.z, inputs.tau_mean_ub);
    let prof = spec.moment_profile(t)?;
    let xp = x.powf(t - 1.0);
    let gamma = (t - 1.0) / theta;
    checks.push(Check::new(
        "x >= z (t-1) / theta",
        x >= z * (t - 1.0) / theta,
        format!("x = {x}, z (t-1) / theta = {:.6e}", z * (t - 1.0) / theta),
    ));

    let (regime, moment, u0, lead_name, log_lead) = if t <= 2.0 {
        let need_e = theta.powf(1.0 - t) * (E - 1.0) * prof.a_t / a;
        let need_theta = theta.powf(1.0 - t) * theta.exp_m1() * prof.a_t / a;
        checks.push(Check::new(
            "x^(t-1) >= theta^(1-t) (e-1) A_t / a",
            xp >= need_e,
            format!("x^(t-1) = {xp:.6e}, threshold = {need_e:.6e}"),
        ));
        checks.push(Check::new(
            "x^(t-1) >= theta^(1-t) (e^theta-1) A_t / a",
            xp >= need_theta,
            format!("x^(t-1) = {xp:.6e}, threshold = {need_theta:.6e}"),
        ));
        let u0 = a * theta.powf(t - 1.0) * xp / prof.a_t;
        let log_c1 = 3f64.ln() + prof.a_t.ln() / theta
            - gamma * theta.ln()
            - (t - 1.0).ln()
            - (1.0 / theta - 1.0) * a.ln();
        (Regime::T3i, prof.a_t, u0, "c1", log_c1)
    } else {
        if prof.var.finite().is_none() {
            return Err(Error::InfiniteVariance);
        }
        let alpha = inputs.alpha;
        let beta = 1.0 - alpha;
        let y = theta * x;
        let rates = rates_t2(Moments::Full(&prof), y, alpha)?;
        checks.push(Check::new(
            "h1 >= h2 at y = theta x",
            rates.regime == T2Regime::II,
            format!("h1 = {:.6e}, h2 = {:.6e}", rates.h1, rates.h2),
        ));
        let need = theta.powf(1.0 - t) * theta.exp_m1() * prof.a_t_plus / (beta * a);
        checks.push(Check::new(
            "x^(t-1) >= theta^(1-t) (e^theta-1) A_{t,+} / (beta a)",
            xp >= need,
            format!("x^(t-1) = {xp:.6e}, threshold = {need:.6e}"),
        ));
        let v0 = beta * a * theta.powf(t - 1.0) * xp / prof.a_t_plus;
        checks.push(Check::new(
            "h2 nonincreasing for y >= theta x",
            h2_nonincreasing(v0, t),
            format!("v(theta x) = {v0:.6e}"),
        ));
        let log_c2 = 3f64.ln() + prof.a_t_plus.ln() / theta
            - gamma * theta.ln()
            - (t - 1.0).ln()
            - (1.0 / theta - 1.0) * a.ln();
        (Regime::T3ii, prof.a_t_plus, v0, "c2", log_c2)
    };
    let validity = require(checks)?;

    // c·β^(-1/θ)·x^(-(t-1)/θ) collapses to 3a/(t-1)·u0^(-1/θ).
    let decay = inv_pow(u0, 1.0 / theta);
    let first = 3.0 * a / (t - 1.0) * (tau / z) * u0.ln_1p() * decay;
    let g = spec.integrated_tail(theta * x);
    let p = spec.tail(theta * x);
    let tail_block = (1.0 + decay) * tau * (g / (theta * z) + p);
    Ok(BoundResult::new(
        first + tail_block,
        regime,
        vec![
            (lead_name, log_lead.exp()),
            ("u0", u0),
            ("moment", moment),
            ("first_term", first),
            ("tail_block", tail_block),
            ("integrated_tail_theta_x", g),
            ("tail_theta_x", p),
            ("alpha", inputs.alpha),
            ("a", a),
            ("tau_mean_ub", tau),
        ],
        validity,
    ))
}

/// Smallest valid closed-form bound over the α grid (case (ii) only depends on α).
pub fn bound_max_t3_best_alpha(
    spec: &DistributionSpec,
    inputs: &BoundInputs,
) -> Result<BoundResult> {
    if inputs.t <= 2.0 {
        return bound_max_t3(spec, inputs);
    }
    best_over_alpha(inputs, |inp| bound_max_t3(spec, inp))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Terms evaluated explicitly before the remainder estimate takes over.
    pub max_terms: usize,
    /// Stop early once a term falls below this fraction of the partial sum.
    pub rel_cutoff: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            max_terms: 256,
            rel_cutoff: 1e-12,
        }
    }
}

/// Hard limit on explicit terms while waiting for a remainder estimate to
/// become available (the two-rate case needs the `h₂` regime to settle).
const HARD_TERM_CAP: usize = 1 << 20;

/// Remainder estimate for `Σ_{j>=J} P(M_τ > x + j z)` given `u(y) >= κ y^p`
/// for every truncation level `y >= Y = θ (x + J z)`.
struct Majorant {
    first: f64,
    tail: f64,
    kappa: f64,
    power: f64,
}

#[allow(clippy::too_many_arguments)]
fn remainder(
    spec: &DistributionSpec,
    a: f64,
    tau: f64,
    theta: f64,
    z: f64,
    y_big: f64,
    kappa: f64,
    power: f64,
) -> Majorant {
    let gamma = power / theta;
    let base = kappa * y_big.powf(power);
    let log_term = base.ln_1p();
    let decay = inv_pow(base, 1.0 / theta);
    // F(Y) + (θ z)^(-1) ∫_Y^∞ F, with F(y) = y^(-1) ln(1 + κ y^p) (κ y^p)^(-1/θ)
    // and the integral bounded by parts.
    let f_at = log_term * decay / y_big;
    let integral = decay * (log_term / gamma + power / (gamma * gamma));
    let first = a * tau * (f_at + integral / (theta * z));
    let tail = (1.0 + decay) * tau * (spec.tail(y_big) + spec.integrated_tail(y_big) / (theta * z));
    Majorant {
        first,
        tail,
        kappa,
        power,
    }
}

/// Lower bound `u(y) >= κ y^(q-1)` for the truncated rate argument
/// `u(y) = |E[X, |X|<=y]| y^(t-1) / E[|X|^t, |X|<=y]` on `y >= Y`, using
/// `E[|X|^t, Y<|X|<=y] <= y^(t-q) E[|X|^q, |X|>Y]` and
/// `|E[X, |X|<=y]| >= -E[X, |X|<=Y] - E[X, X>Y]`.
fn truncated_kappas(spec: &DistributionSpec, t: f64, y_big: f64) -> Result<Vec<(f64, f64)>> {
    let tm = spec.truncated_moments(y_big, t)?;
    let upper_mean = spec.integrated_tail(y_big) + y_big * spec.tail(y_big);
    let mu = -tm.mean_trunc - upper_mean;
    if !(mu > 0.0) {
        return Ok(Vec::new());
    }
    let q_max = spec.tail_index().map_or(t, |r| r.min(t));
    let mut out = Vec::new();
    for f in [0.5, 0.75, 0.9, 0.97, 1.0] {
        let q = 1.0 + f * (q_max - 1.0);
        if q <= 1.0 {
            continue;
        }
        let Ok(beyond) = spec.abs_moment_beyond(q, y_big) else {
            continue;
        };
        // small relative slack keeps the tail moment an upper bound under quadrature error
        let beyond = beyond * (1.0 + 1e-9);
        let kappa = mu / (tm.a_t_trunc * y_big.powf(q - t) + beyond);
        if kappa > 0.0 && kappa.is_finite() {
            out.push((kappa, q - 1.0));
        }
    }
    Ok(out)
}

/// Evaluates `Σ_j P(M_τ > x + j z)` with the cycle bound at truncation level
/// `θ (x + j z)`: the single-rate bound for `t ∈ (1,2]` (optionally with
/// truncated moments), the two-rate bound for `t > 2`.
pub fn bound_max_series(spec: &DistributionSpec, inputs: &BoundInputs) -> Result<BoundResult> {
    bound_max_series_with(spec, inputs, SeriesOptions::default())
}

pub fn bound_max_series_with(
    spec: &DistributionSpec,
    inputs: &BoundInputs,
    opts: SeriesOptions,
) -> Result<BoundResult> {
    let a = spec.validate()?;
    let (checks, theta) = global_checks(inputs);
    let validity = require(checks)?;
    let t = inputs.t;
    if t > 2.0 && inputs.use_truncated {
        return Err(invalid(
            "the series with t > 2 is available with full moments only",
        ));
    }
    if !(t > 1.0) {
        return Err(Error::InvalidOrder {
            t,
            reason: "moment order must exceed 1",
        });
    }
    let (x, z, tau) = (inputs.x, inputs.z, inputs.tau_mean_ub);
    let term_inputs = |j: usize| {
        let xj = x + j as f64 * z;
        BoundInputs {
            x: xj,
            y: Some(theta * xj),
            ..*inputs
        }
    };
    let term = |j: usize| -> Result<BoundResult> {
        let inp = term_inputs(j);
        if t <= 2.0 {
            bound_mtau_t1(spec, &inp)
        } else {
            bound_mtau_t2(spec, &inp)
        }
    };

    // Constant-κ lower bounds on the rate argument for the full-moment routes.
    let full_kappa = if inputs.use_truncated {
        None
    } else if t <= 2.0 {
        let prof = spec.moment_profile(t)?;
        Some(a / prof.a_t)
    } else {
        let prof = spec.moment_profile(t)?;
        Some((1.0 - inputs.alpha) * a / prof.a_t_plus)
    };

    let mut partial = 0.0;
    let mut first_sum = 0.0;
    let mut tail_sum = 0.0;
    let mut regimes_i = 0usize;
    let mut j = 0usize;
    let mut first_validity = None;
    loop {
        let r = term(j).map_err(|e| match e {
            Error::ValidityViolation(mut c) if j > 0 => {
                c.push(Check::new(
                    "term index",
                    false,
                    format!("failed at j = {j}"),
                ));
                Error::ValidityViolation(c)
            }
            e => e,
        })?;
        if j == 0 {
            first_validity = Some(r.validity.clone());
        }
        if r.regime == Regime::T2i {
            regimes_i += 1;
        }
        partial += r.value;
        first_sum += r.term("first_term").unwrap_or(0.0);
        tail_sum += r.term("tail_term").unwrap_or(0.0);
        j += 1;
        let small = r.value <= opts.rel_cutoff * partial;
        if !(small || j >= opts.max_terms) {
            continue;
        }
        // Remainder from J = j on.
        let y_big = theta * (x + j as f64 * z);
        let candidates: Vec<(f64, f64)> = match full_kappa {
            Some(kappa) if t <= 2.0 => vec![(kappa, t - 1.0)],
            Some(kappa) => {
                let prof = spec.moment_profile(t)?;
                let rates = rates_t2(Moments::Full(&prof), y_big, inputs.alpha)?;
                if rates.regime == T2Regime::II && h2_nonincreasing(rates.v, t) {
                    vec![(kappa, t - 1.0)]
                } else {
                    Vec::new()
                }
            }
            None => truncated_kappas(spec, t, y_big)?,
        };
        let best = candidates
            .into_iter()
            .map(|(k, p)| remainder(spec, a, tau, theta, z, y_big, k, p))
            .min_by(|m1, m2| (m1.first + m1.tail).total_cmp(&(m2.first + m2.tail)));
        match best {
            Some(m) => {
                let mut validity = validity;
                validity.extend(first_validity.unwrap_or_default());
                validity.push(Check::new(
                    "remainder estimate available",
                    true,
                    format!(
                        "after {j} terms, kappa = {:.6e}, power = {:.4}",
                        m.kappa, m.power
                    ),
                ));
                let value = partial + m.first + m.tail;
                return Ok(BoundResult::new(
                    value,
                    Regime::Series,
                    vec![
                        ("n_terms", j as f64),
                        ("partial_sum", partial),
                        ("partial_first_terms", first_sum),
                        ("partial_tail_terms", tail_sum),
                        ("remainder_first", m.first),
                        ("remainder_tail", m.tail),
                        ("remainder_kappa", m.kappa),
                        ("remainder_power", m.power),
                        ("terms_in_regime_i", regimes_i as f64),
                        ("a", a),
                        ("tau_mean_ub", tau),
                    ],
                    validity,
                ));
            }
            None if j < HARD_TERM_CAP => continue,
            None => {
                let mut c = validity;
                c.push(Check::new(
                    "remainder estimate available",
                    false,
                    format!("no valid remainder estimate after {j} terms"),
                ));
                return Err(Error::ValidityViolation(c));
            }
        }
    }
}
