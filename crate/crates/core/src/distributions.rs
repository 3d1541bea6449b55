//! Increment laws and the moment and tail functionals the bounds consume.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{invalid, Error, Result};
use crate::quad;

/// Parametric law of one increment `X` of the walk.
///
/// Serializes as `{"family": "...", "params": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// `+u` with probability `p`, `-d` otherwise.
    TwoPoint {
        p: f64,
        u: f64,
        d: f64,
    },
    /// `X = V - shift` with `P(V > v) = (v / scale)^(-r)` for `v >= scale`.
    ParetoShift {
        r: f64,
        scale: f64,
        shift: f64,
    },
    /// `X = E - shift` with `E` exponential of the given rate.
    ExponentialShift {
        rate: f64,
        shift: f64,
    },
    Normal {
        mu: f64,
        sigma: f64,
    },
}

/// Variance of the increment; `Infinite` for Pareto laws with `r <= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variance {
    Finite(f64),
    Infinite,
}

impl Variance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Variance::Finite(v) => Some(v),
            Variance::Infinite => None,
        }
    }
}

/// Full moments of order `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    pub t: f64,
    /// Drift magnitude `-E[X]`.
    pub a: f64,
    /// `E|X|^t`
    pub a_t: f64,
    /// `E[X^t, X > 0]`
    pub a_t_plus: f64,
    /// `E[(X^-)^t]`
    pub a_t_minus: f64,
    pub var: Variance,
}

/// Moments restricted to the truncation level `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedMoments {
    pub y: f64,
    pub t: f64,
    /// `E[X, |X| <= y]`
    pub mean_trunc: f64,
    /// `E[|X|^t, |X| <= y]`
    pub a_t_trunc: f64,
    /// `E[X^t, 0 < X <= y]`
    pub a_t_plus_trunc: f64,
    /// `E[X^2, X <= y]`
    pub b2: f64,
    /// `P(X > y)`
    pub tail_y: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be a positive finite number, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

fn std_normal_sf(w: f64) -> f64 {
    0.5 * erfc(w / SQRT_2)
}

fn std_normal_cdf(w: f64) -> f64 {
    0.5 * erfc(-w / SQRT_2)
}

/// `∫_lo^hi v^(e-1) dv`, with `hi` possibly infinite (then `e < 0`).
fn power_integral(e: f64, lo: f64, hi: f64) -> f64 {
    if hi.is_infinite() {
        return -lo.powf(e) / e;
    }
    let span = (hi / lo).ln();
    if e == 0.0 {
        span
    } else {
        lo.powf(e) * (e * span).exp_m1() / e
    }
}

impl DistributionSpec {
    pub fn two_point(p: f64, u: f64, d: f64) -> Self {
        DistributionSpec::TwoPoint { p, u, d }
    }

    pub fn pareto_shift(r: f64, scale: f64, shift: f64) -> Self {
        DistributionSpec::ParetoShift { r, scale, shift }
    }

    pub fn exponential_shift(rate: f64, shift: f64) -> Self {
        DistributionSpec::ExponentialShift { rate, shift }
    }

    pub fn normal(mu: f64, sigma: f64) -> Self {
        DistributionSpec::Normal { mu, sigma }
    }

    pub fn check_params(&self) -> Result<()> {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid(format!("two_point p must lie in (0,1), got {p}")));
                }
                positive("two_point u", u)?;
                positive("two_point d", d)
            }
            DistributionSpec::ParetoShift { r, scale, shift } => {
                if !(r.is_finite() && r > 1.0) {
                    return Err(invalid(format!("pareto_shift r must exceed 1, got {r}")));
                }
                positive("pareto_shift scale", scale)?;
                finite("pareto_shift shift", shift)
            }
            DistributionSpec::ExponentialShift { rate, shift } => {
                positive("exponential_shift rate", rate)?;
                finite("exponential_shift shift", shift)
            }
            DistributionSpec::Normal { mu, sigma } => {
                finite("normal mu", mu)?;
                positive("normal sigma", sigma)
            }
        }
    }

    /// `E[X]`; parameters are not validated.
    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => p * u - (1.0 - p) * d,
            DistributionSpec::ParetoShift { r, scale, shift } => r * scale / (r - 1.0) - shift,
            DistributionSpec::ExponentialShift { rate, shift } => 1.0 / rate - shift,
            DistributionSpec::Normal { mu, .. } => mu,
        }
    }

    /// Checks the parameters and returns the drift `a = -E[X] > 0`.
    pub fn validate(&self) -> Result<f64> {
        self.check_params()?;
        let mean = self.mean();
        if mean < 0.0 {
            Ok(-mean)
        } else {
            Err(Error::NonNegativeDrift { mean })
        }
    }

    /// Right tail index for the Pareto family, `None` for laws with all moments.
    pub fn tail_index(&self) -> Option<f64> {
        match *self {
            DistributionSpec::ParetoShift { r, .. } => Some(r),
            _ => None,
        }
    }

    pub fn has_exponential_moments(&self) -> bool {
        self.tail_index().is_none()
    }

    fn require_moment(&self, t: f64) -> Result<()> {
        match self.tail_index() {
            Some(r) if t >= r => Err(Error::MomentDoesNotExist {
                order: t,
                tail_index: r,
            }),
            _ => Ok(()),
        }
    }

    pub fn variance(&self) -> Variance {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                let m = self.mean();
                Variance::Finite(p * u * u + (1.0 - p) * d * d - m * m)
            }
            DistributionSpec::ParetoShift { r, scale, .. } => {
                if r > 2.0 {
                    Variance::Finite(scale * scale * r / ((r - 1.0) * (r - 1.0) * (r - 2.0)))
                } else {
                    Variance::Infinite
                }
            }
            DistributionSpec::ExponentialShift { rate, .. } => {
                Variance::Finite(1.0 / (rate * rate))
            }
            DistributionSpec::Normal { sigma, .. } => Variance::Finite(sigma * sigma),
        }
    }

    /// `P(X > v)`, exact per family.
    pub fn tail(&self, v: f64) -> f64 {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                if v < -d {
                    1.0
                } else if v < u {
                    p
                } else {
                    0.0
                }
            }
            DistributionSpec::ParetoShift { r, scale, shift } => {
                let c = v + shift;
                if c <= scale {
                    1.0
                } else {
                    (c / scale).powf(-r)
                }
            }
            DistributionSpec::ExponentialShift { rate, shift } => {
                let c = v + shift;
                if c <= 0.0 {
                    1.0
                } else {
                    (-rate * c).exp()
                }
            }
            DistributionSpec::Normal { mu, sigma } => std_normal_sf((v - mu) / sigma),
        }
    }

    /// Integrated tail `G(x) = ∫_x^∞ P(X > u) du = E[(X - x)^+]`.
    pub fn integrated_tail(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                p * (u - x).max(0.0) + (1.0 - p) * (-d - x).max(0.0)
            }
            DistributionSpec::ParetoShift { r, scale, shift } => {
                let c = x + shift;
                if c >= scale {
                    scale.powf(r) * c.powf(1.0 - r) / (r - 1.0)
                } else {
                    (scale - c) + scale / (r - 1.0)
                }
            }
            DistributionSpec::ExponentialShift { rate, shift } => {
                let c = x + shift;
                if c >= 0.0 {
                    (-rate * c).exp() / rate
                } else {
                    -c + 1.0 / rate
                }
            }
            DistributionSpec::Normal { mu, sigma } => {
                let top = mu + 40.0 * sigma;
                let bottom = mu - 40.0 * sigma;
                let breaks = sigma_breaks(mu, sigma);
                if x >= mu {
                    if x >= top {
                        return 0.0;
                    }
                    quad::integrate_with_breaks(
                        |u| std_normal_sf((u - mu) / sigma),
                        x,
                        top,
                        &breaks,
                        quad::REL_TOL,
                    )
                    .value
                } else {
                    // E[(X-x)^+] = (mu - x) + E[(x-X)^+]
                    let lower = if x <= bottom {
                        0.0
                    } else {
                        quad::integrate_with_breaks(
                            |u| std_normal_cdf((u - mu) / sigma),
                            bottom,
                            x,
                            &breaks,
                            quad::REL_TOL,
                        )
                        .value
                    };
                    (mu - x) + lower
                }
            }
        }
    }

    /// `E[|X|^t, lo < X < hi]` for the continuous families. Endpoints may be
    /// infinite; the caller guarantees existence of the moment.
    fn abs_moment_between(&self, t: f64, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                let mut acc = 0.0;
                if lo < u && u < hi {
                    acc += p * u.powf(t);
                }
                if lo < -d && -d < hi {
                    acc += (1.0 - p) * d.powf(t);
                }
                acc
            }
            DistributionSpec::ParetoShift { r, scale, shift } => {
                pareto_abs_power(t, r, scale, shift, lo + shift, hi + shift)
            }
            DistributionSpec::ExponentialShift { rate, shift } => {
                let elo = (lo + shift).max(0.0);
                let cap = elo + 745.0 / rate;
                let ehi = (hi + shift).min(cap);
                if !(ehi > elo) {
                    return 0.0;
                }
                let mut breaks = vec![shift];
                let mut k = 1.0;
                while k < 745.0 {
                    breaks.push(elo + k / rate);
                    k *= 2.0;
                }
                quad::integrate_with_breaks(
                    |e| (e - shift).abs().powf(t) * rate * (-rate * e).exp(),
                    elo,
                    ehi,
                    &breaks,
                    quad::REL_TOL,
                )
                .value
            }
            DistributionSpec::Normal { mu, sigma } => {
                let xlo = lo.max(mu - 40.0 * sigma);
                let xhi = hi.min(mu + 40.0 * sigma);
                if !(xhi > xlo) {
                    return 0.0;
                }
                let mut breaks = sigma_breaks(mu, sigma);
                breaks.push(0.0);
                let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
                quad::integrate_with_breaks(
                    |v| {
                        let w = (v - mu) / sigma;
                        v.abs().powf(t) * norm * (-0.5 * w * w).exp()
                    },
                    xlo,
                    xhi,
                    &breaks,
                    quad::REL_TOL,
                )
                .value
            }
        }
    }

    /// Full absolute moment `E|X|^t`.
    pub fn abs_moment(&self, t: f64) -> Result<f64> {
        self.check_params()?;
        self.require_moment(t)?;
        Ok(self.abs_moment_between(t, f64::NEG_INFINITY, f64::INFINITY))
    }

    /// `E[(X^-)^t]`; finite for every family here.
    pub fn negative_part_moment(&self, t: f64) -> Result<f64> {
        self.check_params()?;
        Ok(self.abs_moment_between(t, f64::NEG_INFINITY, 0.0))
    }

    /// `E[|X|^t, |X| > y]`.
    pub fn abs_moment_beyond(&self, t: f64, y: f64) -> Result<f64> {
        self.check_params()?;
        self.require_moment(t)?;
        Ok(self.abs_moment_between(t, y, f64::INFINITY)
            + self.abs_moment_between(t, f64::NEG_INFINITY, -y))
    }

    pub fn moment_profile(&self, t: f64) -> Result<MomentProfile> {
        let a = self.validate()?;
        if !(t.is_finite() && t > 1.0) {
            return Err(invalid(format!("moment order must exceed 1, got {t}")));
        }
        self.require_moment(t)?;
        let a_t = self.abs_moment_between(t, f64::NEG_INFINITY, f64::INFINITY);
        let a_t_plus = self.abs_moment_between(t, 0.0, f64::INFINITY);
        let a_t_minus = self.abs_moment_between(t, f64::NEG_INFINITY, 0.0);
        Ok(MomentProfile {
            t,
            a,
            a_t,
            a_t_plus,
            a_t_minus,
            var: self.variance(),
        })
    }

    pub fn truncated_moments(&self, y: f64, t: f64) -> Result<TruncatedMoments> {
        self.check_params()?;
        if !(y > 0.0) || y.is_nan() {
            return Err(invalid(format!(
                "truncation level y must be positive, got {y}"
            )));
        }
        if !(t.is_finite() && t > 1.0) {
            return Err(invalid(format!("moment order must exceed 1, got {t}")));
        }
        let tail_y = self.tail(y);
        if let DistributionSpec::TwoPoint { p, u, d } = *self {
            let q = 1.0 - p;
            let up_in = u <= y;
            let down_in = d <= y;
            let pick = |cond: bool, v: f64| if cond { v } else { 0.0 };
            return Ok(TruncatedMoments {
                y,
                t,
                mean_trunc: pick(up_in, p * u) - pick(down_in, q * d),
                a_t_trunc: pick(up_in, p * u.powf(t)) + pick(down_in, q * d.powf(t)),
                a_t_plus_trunc: pick(up_in, p * u.powf(t)),
                b2: pick(up_in, p * u * u) + q * d * d,
                tail_y,
            });
        }
        let pos1 = self.abs_moment_between(1.0, 0.0, y);
        let neg1 = self.abs_moment_between(1.0, -y, 0.0);
        let a_t_plus_trunc = self.abs_moment_between(t, 0.0, y);
        let a_t_minus_trunc = self.abs_moment_between(t, -y, 0.0);
        Ok(TruncatedMoments {
            y,
            t,
            mean_trunc: pos1 - neg1,
            a_t_trunc: a_t_plus_trunc + a_t_minus_trunc,
            a_t_plus_trunc,
            b2: self.abs_moment_between(2.0, f64::NEG_INFINITY, y),
            tail_y,
        })
    }

    /// `E[e^{hX}, X <= y]`, the quantity certified by the rate condition.
    pub fn mgf_truncated(&self, h: f64, y: f64) -> f64 {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                let mut acc = 0.0;
                if u <= y {
                    acc += p * (h * u).exp();
                }
                if -d <= y {
                    acc += (1.0 - p) * (-h * d).exp();
                }
                acc
            }
            DistributionSpec::ParetoShift { r, scale, shift } => {
                let vhi = y + shift;
                if vhi <= scale {
                    return 0.0;
                }
                let below = 1.0 - self.tail(y);
                if h == 0.0 {
                    return below;
                }
                // P(X <= y) + E[e^{hX} - 1, X <= y], the latter in log-space of V.
                let coef = r * scale.powf(r);
                let excess = quad::integrate_with_breaks(
                    |w: f64| {
                        let v = w.exp();
                        (h * (v - shift)).exp_m1() * coef * (-r * w).exp()
                    },
                    scale.ln(),
                    vhi.ln(),
                    &log_breaks(scale, vhi, shift),
                    1e-13,
                )
                .value;
                below + excess
            }
            DistributionSpec::ExponentialShift { rate, shift } => {
                let c = y + shift;
                if c <= 0.0 {
                    return 0.0;
                }
                let diff = h - rate;
                let inner = if diff == 0.0 {
                    c
                } else {
                    (diff * c).exp_m1() / diff
                };
                (-h * shift).exp() * rate * inner
            }
            DistributionSpec::Normal { mu, sigma } => {
                let shift = (h * mu + 0.5 * h * h * sigma * sigma).exp();
                shift * std_normal_cdf((y - mu - h * sigma * sigma) / sigma)
            }
        }
    }

    /// `log E[e^{hX}]` for `h >= 0`, or `None` where the moment generating
    /// function is infinite.
    pub fn log_mgf(&self, h: f64) -> Option<f64> {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                let a = p.ln() + h * u;
                let b = (1.0 - p).ln() - h * d;
                let m = a.max(b);
                Some(m + ((a - m).exp() + (b - m).exp()).ln())
            }
            DistributionSpec::ParetoShift { .. } => (h == 0.0).then_some(0.0),
            DistributionSpec::ExponentialShift { rate, shift } => {
                if h < rate {
                    Some(-h * shift + (rate / (rate - h)).ln())
                } else {
                    None
                }
            }
            DistributionSpec::Normal { mu, sigma } => Some(h * mu + 0.5 * h * h * sigma * sigma),
        }
    }

    /// Upper end of the interval of `h` where the mgf is finite, if bounded.
    pub fn mgf_abscissa(&self) -> f64 {
        match *self {
            DistributionSpec::ExponentialShift { rate, .. } => rate,
            DistributionSpec::ParetoShift { .. } => 0.0,
            _ => f64::INFINITY,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::TwoPoint { p, u, d } => {
                if rng.random::<f64>() < p {
                    u
                } else {
                    -d
                }
            }
            DistributionSpec::ParetoShift { r, scale, shift } => {
                // 1 - U lies in (0, 1]
                let w = 1.0 - rng.random::<f64>();
                scale * w.powf(-1.0 / r) - shift
            }
            DistributionSpec::ExponentialShift { rate, shift } => {
                let w = 1.0 - rng.random::<f64>();
                -w.ln() / rate - shift
            }
            DistributionSpec::Normal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
        }
    }
}

fn sigma_breaks(mu: f64, sigma: f64) -> Vec<f64> {
    let mut out = vec![mu];
    for k in [1.0, 2.0, 4.0, 8.0, 16.0] {
        out.push(mu - k * sigma);
        out.push(mu + k * sigma);
    }
    out
}

fn log_breaks(lo: f64, hi: f64, shift: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if shift > lo && shift < hi {
        out.push(shift.ln());
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut w = llo + 1.0;
    while w < lhi {
        out.push(w);
        w += 4.0;
    }
    out
}

/// `E[|V - s|^t, vlo < V < vhi]` for `V` Pareto(`r`, `scale`), i.e. the
/// absolute `t`-moment of `X = V - s` over a window in `V` coordinates.
///
/// Near the support the integral is evaluated by quadrature in `ln v`; beyond
/// `B = max(4|s|, scale)` the binomial series of `(1 - s/v)^t` is integrated
/// term by term, which handles the power tail exactly.
fn pareto_abs_power(t: f64, r: f64, scale: f64, s: f64, vlo: f64, vhi: f64) -> f64 {
    let vlo = vlo.max(scale);
    if !(vhi > vlo) {
        return 0.0;
    }
    let coef = r * scale.powf(r);
    let split = (4.0 * s.abs()).max(scale);
    let mut total = 0.0;

    let qhi = vhi.min(split);
    if qhi > vlo {
        total += quad::integrate_with_breaks(
            |w: f64| {
                let v = w.exp();
                (v - s).abs().powf(t) * coef * (-r * w).exp()
            },
            vlo.ln(),
            qhi.ln(),
            &log_breaks(vlo, qhi, s),
            quad::REL_TOL,
        )
        .value;
    }

    let slo = vlo.max(split);
    if vhi > slo {
        let mut binom = 1.0;
        let mut series = 0.0;
        let mut neg_s_pow = 1.0;
        for k in 0..400 {
            let kf = k as f64;
            let e = t - r - kf;
            let term = binom * neg_s_pow * power_integral(e, slo, vhi);
            series += term;
            if s == 0.0 || (kf > t + 1.0 && term.abs() <= 1e-17 * series.abs()) {
                break;
            }
            binom *= (t - kf) / (kf + 1.0);
            neg_s_pow *= -s;
            if binom == 0.0 {
                break;
            }
        }
        total += coef * series;
    }
    total
}
