//! Bound-versus-oracle verification suites behind `driftbound verify`.
//!
//! Every row compares one bound with one reference: exact lattice values for
//! the ±1 walk, Monte Carlo estimates (with a 3 stderr allowance) elsewhere,
//! and the Wald gap for the cycle-length estimates.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_max_series, bound_max_t3, bound_mtau_t1, bound_mtau_t2, cramer_lundberg, lemma1_bound,
    rate_t1, tau_mean_ub, BoundInputs, BoundResult, Moments, OvershootMethod,
};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::heavytraffic::fmt_float;
use crate::montecarlo::{
    default_stop_margin, estimate_m_tail, estimate_mtau_tail, estimate_tau_overshoot,
    exact_lattice_oracle,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Domination,
    MonteCarlo,
    Wald,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replications per Monte Carlo reference.
    pub n_mc: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            n_mc: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub suite: &'static str,
    pub case: String,
    pub x: f64,
    pub z: f64,
    /// `y` for cycle bounds, `θ` for global bounds, NaN otherwise.
    pub param: f64,
    pub value: f64,
    pub reference: f64,
    pub stderr: f64,
    pub passed: bool,
}

const LATTICE_P: f64 = 0.25;

/// Keeps valid bounds, skips precondition failures, propagates the rest.
fn keep(r: Result<BoundResult>) -> Result<Option<BoundResult>> {
    match r {
        Ok(b) => Ok(Some(b)),
        Err(Error::ValidityViolation(_) | Error::RateNotCertified { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

struct Rows {
    suite: &'static str,
    rows: Vec<VerifyRow>,
}

impl Rows {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        case: String,
        x: f64,
        z: f64,
        param: f64,
        b: &BoundResult,
        reference: f64,
        stderr: f64,
    ) {
        let passed = b.value_clamped >= reference - 3.0 * stderr - 1e-15;
        self.rows.push(VerifyRow {
            suite: self.suite,
            case,
            x,
            z,
            param,
            value: b.value_clamped,
            reference,
            stderr,
            passed,
        });
    }
}

/// Lattice walk `±1` with `p = 1/4` against exact absorbing-chain values.
pub fn domination_suite() -> Result<Vec<VerifyRow>> {
    let spec = DistributionSpec::two_point(LATTICE_P, 1.0, 1.0);
    let prof2 = spec.moment_profile(2.0)?;
    let mut out = Rows {
        suite: "domination",
        rows: Vec::new(),
    };
    for z in [2.0, 5.0, 10.0] {
        let tau = tau_mean_ub(&spec, z, OvershootMethod::Lorden)?;
        for xi in 3..=40 {
            let x = xi as f64;
            let exact = exact_lattice_oracle(LATTICE_P, z, x)?;
            for y in [0.5 * x, 0.75 * x, x] {
                let inp = BoundInputs::cycle(x, y, 2.0, tau);
                if let Ok(rate) = rate_t1(Moments::Full(&prof2), y) {
                    if let Some(b) = keep(lemma1_bound(&spec, rate.h, x, y, tau))? {
                        out.push("lemma1".into(), x, z, y, &b, exact.mtau_tail, 0.0);
                    }
                }
                if let Some(b) = keep(bound_mtau_t1(&spec, &inp))? {
                    out.push("t1".into(), x, z, y, &b, exact.mtau_tail, 0.0);
                }
                let inp3 = BoundInputs::cycle(x, y, 3.0, tau);
                if let Some(b) = keep(bound_mtau_t2(&spec, &inp3))? {
                    out.push(
                        format!("t2_{}", b.regime),
                        x,
                        z,
                        y,
                        &b,
                        exact.mtau_tail,
                        0.0,
                    );
                }
            }
            for theta in [0.25, 0.5, 0.75] {
                let inp = BoundInputs::global(x, z, theta, 2.0, tau);
                if let Some(b) = keep(bound_max_t3(&spec, &inp))? {
                    out.push("t3".into(), x, z, theta, &b, exact.m_tail, 0.0);
                }
                if let Some(b) = keep(bound_max_series(&spec, &inp))? {
                    out.push("series_t2".into(), x, z, theta, &b, exact.m_tail, 0.0);
                }
                let inp3 = BoundInputs::global(x, z, theta, 3.0, tau);
                if let Some(b) = keep(bound_max_series(&spec, &inp3))? {
                    out.push("series_t3".into(), x, z, theta, &b, exact.m_tail, 0.0);
                }
            }
        }
    }
    Ok(out.rows)
}

fn mc_specs() -> Vec<(&'static str, DistributionSpec, f64)> {
    vec![
        ("pareto", DistributionSpec::pareto_shift(3.0, 1.0, 2.0), 2.5),
        (
            "exponential",
            DistributionSpec::exponential_shift(1.0, 1.5),
            3.0,
        ),
        ("normal", DistributionSpec::normal(-1.0, 1.0), 3.0),
    ]
}

/// Continuous laws against Monte Carlo references.
pub fn montecarlo_suite(opts: &VerifyOptions) -> Result<Vec<VerifyRow>> {
    let mut out = Rows {
        suite: "montecarlo",
        rows: Vec::new(),
    };
    let z = 5.0;
    let mut stream = 0u64;
    let mut next_seed = || {
        stream += 1;
        opts.seed.wrapping_mul(1_000_003).wrapping_add(stream)
    };
    for (name, spec, t2) in mc_specs() {
        let tau = tau_mean_ub(&spec, z, OvershootMethod::Lorden)?;
        let margin = default_stop_margin(&spec)?;
        for x in [5.0, 10.0, 20.0] {
            let cyc = estimate_mtau_tail(&spec, z, x, opts.n_mc, next_seed())?;
            let glob = estimate_m_tail(&spec, x, opts.n_mc, next_seed(), margin)?;
            for y in [0.5 * x, x] {
                if let Some(b) = keep(bound_mtau_t1(&spec, &BoundInputs::cycle(x, y, 2.0, tau)))? {
                    out.push(format!("{name}_t1"), x, z, y, &b, cyc.p_hat, cyc.stderr);
                }
                if let Some(b) = keep(bound_mtau_t2(&spec, &BoundInputs::cycle(x, y, t2, tau)))? {
                    out.push(format!("{name}_t2"), x, z, y, &b, cyc.p_hat, cyc.stderr);
                }
            }
            for theta in [0.5, 0.75] {
                let inp = BoundInputs::global(x, z, theta, 2.0, tau);
                if let Some(b) = keep(bound_max_t3(&spec, &inp))? {
                    out.push(
                        format!("{name}_t3"),
                        x,
                        z,
                        theta,
                        &b,
                        glob.p_hat,
                        glob.stderr,
                    );
                }
                if let Some(b) = keep(bound_max_series(&spec, &inp))? {
                    out.push(
                        format!("{name}_series"),
                        x,
                        z,
                        theta,
                        &b,
                        glob.p_hat,
                        glob.stderr,
                    );
                }
            }
            if let Some(b) = cramer_lundberg(&spec, x)? {
                out.push(
                    format!("{name}_cramer"),
                    x,
                    z,
                    f64::NAN,
                    &b,
                    glob.p_hat,
                    glob.stderr,
                );
            }
        }
    }
    Ok(out.rows)
}

/// The four families used by the Wald check.
pub fn wald_specs() -> Vec<(&'static str, DistributionSpec)> {
    vec![
        ("two_point", DistributionSpec::two_point(0.25, 1.0, 1.0)),
        ("pareto", DistributionSpec::pareto_shift(3.0, 1.0, 2.0)),
        ("exponential", DistributionSpec::exponential_shift(1.0, 1.5)),
        ("normal", DistributionSpec::normal(-1.0, 1.0)),
    ]
}

/// `|a τ̂ - z - R̂| <= 4 stderr` per family and `z ∈ {5, 20}`.
pub fn wald_suite(opts: &VerifyOptions) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for (i, (name, spec)) in wald_specs().into_iter().enumerate() {
        for (j, z) in [5.0, 20.0].into_iter().enumerate() {
            let seed = opts
                .seed
                .wrapping_mul(1_000_003)
                .wrapping_add(100 + 2 * i as u64 + j as u64);
            let r = estimate_tau_overshoot(&spec, z, opts.n_mc, seed)?;
            rows.push(VerifyRow {
                suite: "wald",
                case: name.to_string(),
                x: f64::NAN,
                z,
                param: f64::NAN,
                value: r.wald_gap,
                reference: 0.0,
                stderr: r.wald_stderr,
                passed: r.wald.passed,
            });
        }
    }
    Ok(rows)
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<VerifyRow>> {
    Ok(match suite {
        Suite::Domination => domination_suite()?,
        Suite::MonteCarlo => montecarlo_suite(opts)?,
        Suite::Wald => wald_suite(opts)?,
        Suite::All => {
            let mut v = domination_suite()?;
            v.extend(montecarlo_suite(opts)?);
            v.extend(wald_suite(opts)?);
            v
        }
    })
}

fn fmt_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        fmt_float(v)
    }
}

pub fn write_csv<W: Write>(rows: &[VerifyRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "suite,case,x,z,param,value,reference,stderr,passed")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.suite,
            r.case,
            fmt_cell(r.x),
            fmt_cell(r.z),
            fmt_cell(r.param),
            fmt_cell(r.value),
            fmt_cell(r.reference),
            fmt_cell(r.stderr),
            if r.passed { "pass" } else { "fail" }
        )?;
    }
    Ok(())
}
