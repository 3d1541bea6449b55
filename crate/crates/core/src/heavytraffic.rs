//! Heavy-traffic experiments for the families `X^(a) = X^(0) - a` with a
//! mean-zero shifted Pareto base, as `a -> 0` along a schedule `x_a`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_max_series, bound_max_t3_best_alpha, tau_mean_ub, BoundInputs, OvershootMethod,
};
use crate::distributions::DistributionSpec;
use crate::error::{invalid, Error, Result};
use crate::montecarlo::{default_stop_margin, estimate_m_tail};

/// Rule `a -> x_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Schedule {
    /// `x_a = c a^(-1) ln(1/a)`.
    LogScaled { c: f64 },
    /// `x_a = c a^(-kappa)`.
    Power { c: f64, kappa: f64 },
}

impl Schedule {
    pub fn x(&self, a: f64) -> f64 {
        match *self {
            Schedule::LogScaled { c } => c / a * (1.0 / a).ln(),
            Schedule::Power { c, kappa } => c * a.powf(-kappa),
        }
    }
}

/// Rule `(a, x_a) -> z_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ZRule {
    /// `z_a = c sqrt(x_a / a)`.
    SqrtScaled { c: f64 },
}

impl Default for ZRule {
    fn default() -> Self {
        ZRule::SqrtScaled { c: 10.0 }
    }
}

impl ZRule {
    pub fn z(&self, a: f64, x: f64) -> f64 {
        match *self {
            ZRule::SqrtScaled { c } => c * (x / a).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Track {
    /// `r > 2`: closed form with two rates.
    T4,
    /// `r ∈ (1,2)` with a bounded-variance negative part: truncated series at `t = 2`.
    T5,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeavyTrafficFamily {
    /// Mean-zero `X^(0)`, a shifted Pareto law.
    pub base: DistributionSpec,
    /// Decreasing drifts.
    pub drifts: Vec<f64>,
    pub x_schedule: Schedule,
}

impl HeavyTrafficFamily {
    /// Centered Pareto base: shift `r scale / (r-1)`.
    pub fn centered_pareto(
        r: f64,
        scale: f64,
        drifts: Vec<f64>,
        x_schedule: Schedule,
    ) -> Result<Self> {
        if !(r > 1.0) {
            return Err(invalid(format!("tail index must exceed 1, got {r}")));
        }
        let fam = HeavyTrafficFamily {
            base: DistributionSpec::pareto_shift(r, scale, r * scale / (r - 1.0)),
            drifts,
            x_schedule,
        };
        fam.validate()?;
        Ok(fam)
    }

    fn pareto(&self) -> Result<(f64, f64, f64)> {
        match self.base {
            DistributionSpec::ParetoShift { r, scale, shift } => Ok((r, scale, shift)),
            _ => Err(invalid("heavy-traffic families use a shifted Pareto base")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (r, scale, _) = self.pareto()?;
        self.base.check_params()?;
        if self.base.mean().abs() > 1e-12 * scale.max(1.0) {
            return Err(invalid(format!(
                "base must have mean zero, got {}",
                self.base.mean()
            )));
        }
        if (r - 2.0).abs() < f64::EPSILON {
            return Err(invalid("tail index 2 belongs to neither track"));
        }
        if self.drifts.is_empty() || self.drifts.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(invalid("drifts must lie in (0, 1)"));
        }
        if self.drifts.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("drifts must be strictly decreasing"));
        }
        Ok(())
    }

    pub fn r(&self) -> f64 {
        self.pareto().map(|p| p.0).unwrap_or(f64::NAN)
    }

    /// `L = scale^r` in `P(X > v) ~ L v^(-r)`.
    pub fn l_const(&self) -> f64 {
        self.pareto().map(|(r, s, _)| s.powf(r)).unwrap_or(f64::NAN)
    }

    pub fn sigma2(&self) -> Option<f64> {
        self.base.variance().finite()
    }

    pub fn track(&self) -> Track {
        if self.r() > 2.0 {
            Track::T4
        } else {
            Track::T5
        }
    }

    /// `X^(a) = X^(0) - a`.
    pub fn at(&self, a: f64) -> Result<DistributionSpec> {
        let (r, scale, shift) = self.pareto()?;
        Ok(DistributionSpec::pareto_shift(r, scale, shift + a))
    }
}

/// `x^(1-r) L / ((r-1) a)`.
pub fn ht_asymptote(r: f64, l_const: f64, a: f64, x: f64) -> f64 {
    x.powf(1.0 - r) * l_const / ((r - 1.0) * a)
}

/// `a x^(r-1) / L`; must grow without bound along the schedule.
pub fn g_scale(r: f64, l_const: f64, a: f64, x: f64) -> f64 {
    a * x.powf(r - 1.0) / l_const
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T4Condition {
    /// `e^r (r-2) σ² / 2`.
    pub threshold: f64,
    /// `(a, x_a / (a^(-1) ln(1/a)), passes)`.
    pub rows: Vec<(f64, f64, bool)>,
}

pub fn t4_condition(
    r: f64,
    sigma2: f64,
    schedule: &Schedule,
    drifts: &[f64],
) -> Result<T4Condition> {
    if !(r > 2.0) {
        return Err(Error::InvalidOrder {
            t: r,
            reason: "the log-scaled schedule condition needs tail index above 2",
        });
    }
    if !sigma2.is_finite() || !(sigma2 > 0.0) {
        return Err(Error::InfiniteVariance);
    }
    let threshold = r.exp() * (r - 2.0) * sigma2 / 2.0;
    let rows = drifts
        .iter()
        .map(|&a| {
            let ratio = schedule.x(a) / ((1.0 / a) * (1.0 / a).ln());
            (a, ratio, ratio > threshold)
        })
        .collect();
    Ok(T4Condition { threshold, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub z_rule: ZRule,
    pub theta: f64,
    /// Moment order; defaults to `r - 0.1` on the T4 track and 2 on the T5 track.
    pub t: Option<f64>,
    pub n_mc: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Condition {
    T4 {
        ratio: f64,
        threshold: f64,
        pass: bool,
    },
    G {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtRow {
    pub a: f64,
    pub x_a: f64,
    pub z_a: f64,
    pub theta: f64,
    pub t: f64,
    pub bound_value: Option<f64>,
    pub bound_ratio: Option<f64>,
    pub mc_estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub mc_ratio: Option<f64>,
    pub asymptote: f64,
    pub condition: Condition,
    pub validity_notes: String,
}

/// splitmix64 finalizer; derives a per-row seed.
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn failed_checks(e: &Error) -> String {
    match e {
        Error::ValidityViolation(c) => c
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; "),
        e => e.to_string(),
    }
}

/// One row per drift: bound, Monte Carlo estimate where
/// `asymptote >= 10 / n_mc`, and both ratios against the asymptote.
pub fn ht_ratio_experiment(
    family: &HeavyTrafficFamily,
    cfg: &ExperimentConfig,
) -> Result<Vec<HtRow>> {
    family.validate()?;
    if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(invalid(format!(
            "theta must lie in (0, 1), got {}",
            cfg.theta
        )));
    }
    let (r, l) = (family.r(), family.l_const());
    let track = family.track();
    let t = cfg.t.unwrap_or(match track {
        Track::T4 => r - 0.1,
        Track::T5 => 2.0,
    });
    match track {
        Track::T4 if !(t > 2.0 && t < r) => {
            return Err(invalid(format!(
                "need 2 < t < r on this track, got t = {t}"
            )))
        }
        Track::T5 if t != 2.0 => return Err(invalid("the r < 2 track uses t = 2")),
        _ => {}
    }
    let t4 = match track {
        Track::T4 => Some(t4_condition(
            r,
            family.sigma2().ok_or(Error::InfiniteVariance)?,
            &family.x_schedule,
            &family.drifts,
        )?),
        Track::T5 => None,
    };
    let mut rows = Vec::with_capacity(family.drifts.len());
    for (i, &a) in family.drifts.iter().enumerate() {
        let spec = family.at(a)?;
        let x = family.x_schedule.x(a);
        let z = cfg.z_rule.z(a, x);
        let asymptote = ht_asymptote(r, l, a, x);
        let mut notes = Vec::new();
        let condition = match &t4 {
            Some(c) => {
                let (_, ratio, pass) = c.rows[i];
                if !pass {
                    notes.push(format!(
                        "schedule ratio {ratio:.4} <= threshold {:.4}",
                        c.threshold
                    ));
                }
                Condition::T4 {
                    ratio,
                    threshold: c.threshold,
                    pass,
                }
            }
            None => Condition::G {
                value: g_scale(r, l, a, x),
            },
        };
        let bound = tau_mean_ub(&spec, z, OvershootMethod::Lorden).and_then(|tau| {
            let inp = BoundInputs::global(x, z, cfg.theta, t, tau);
            match track {
                Track::T4 => bound_max_t3_best_alpha(&spec, &inp),
                Track::T5 => bound_max_series(&spec, &inp.truncated(true)),
            }
        });
        let bound_value = match bound {
            Ok(b) => Some(b.value),
            Err(e) => {
                notes.push(format!("bound invalid: {}", failed_checks(&e)));
                None
            }
        };
        let (mut mc_estimate, mut mc_stderr) = (None, None);
        if cfg.n_mc > 0 && asymptote >= 10.0 / cfg.n_mc as f64 {
            let est = estimate_m_tail(
                &spec,
                x,
                cfg.n_mc,
                mix(cfg.seed, i as u64),
                default_stop_margin(&spec)?,
            )?;
            mc_estimate = Some(est.p_hat);
            mc_stderr = Some(est.stderr);
        } else if cfg.n_mc == 0 {
            notes.push("mc disabled".to_string());
        } else {
            notes.push("mc skipped: event too rare".to_string());
        }
        if asymptote > 1.0 {
            notes.push("asymptote above 1: pre-asymptotic".to_string());
        }
        rows.push(HtRow {
            a,
            x_a: x,
            z_a: z,
            theta: cfg.theta,
            t,
            bound_value,
            bound_ratio: bound_value.map(|b| b / asymptote),
            mc_estimate,
            mc_stderr,
            mc_ratio: mc_estimate.map(|m| m / asymptote),
            asymptote,
            condition,
            validity_notes: notes.join("; "),
        });
    }
    Ok(rows)
}

/// Twelve significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the table with the fixed column order; the condition column is
/// `cond_t4` (pass/fail) or `cond_g` (value) by track.
pub fn write_csv<W: Write>(rows: &[HtRow], mut w: W) -> std::io::Result<()> {
    let cond_name = match rows.first().map(|r| r.condition) {
        Some(Condition::G { .. }) => "cond_g",
        _ => "cond_t4",
    };
    writeln!(
        w,
        "a,x_a,z_a,theta,t,bound_value,bound_ratio,mc_estimate,mc_stderr,mc_ratio,asymptote,{cond_name},validity_notes"
    )?;
    for r in rows {
        let cond = match r.condition {
            Condition::T4 { pass, .. } => (if pass { "pass" } else { "fail" }).to_string(),
            Condition::G { value } => fmt_float(value),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_float(r.a),
            fmt_float(r.x_a),
            fmt_float(r.z_a),
            fmt_float(r.theta),
            fmt_float(r.t),
            fmt_opt(r.bound_value),
            fmt_opt(r.bound_ratio),
            fmt_opt(r.mc_estimate),
            fmt_opt(r.mc_stderr),
            fmt_opt(r.mc_ratio),
            fmt_float(r.asymptote),
            cond,
            csv_text(&r.validity_notes),
        )?;
    }
    Ok(())
}
