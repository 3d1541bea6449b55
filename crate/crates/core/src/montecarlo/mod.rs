//! Regenerative simulation of the walk and the exact lattice oracle.
//!
//! Replication `i` draws from its own ChaCha8 stream `(seed, i)`. Replications
//! are grouped in fixed chunks that are accumulated in index order and merged
//! in chunk order, so estimates are bit-identical for any rayon pool size.

mod lattice;

pub use lattice::{exact_lattice_oracle, lattice_m_at_least, LatticeExact};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{invalid, Check, Error, Result};

/// Safety cap on steps per replication.
pub const STEP_CAP: u64 = 1_000_000_000;

const CHUNK: u64 = 4096;

/// One regenerative cycle up to `τ_z = min{k : S_k <= -z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    pub tau: u64,
    /// `max_{1<=k<=τ} S_k`.
    pub cycle_max: f64,
    /// `R_z = -z - S_τ >= 0`.
    pub overshoot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub ci95: [f64; 2],
}

impl McEstimate {
    fn proportion(hits: u64, n: u64, seed: u64) -> Self {
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        McEstimate {
            p_hat: p,
            stderr: se,
            n,
            seed,
            ci95: [(p - 1.96 * se).max(0.0), (p + 1.96 * se).min(1.0)],
        }
    }

    fn mean(m: &Moments, seed: u64) -> Self {
        let (mean, se) = m.mean_stderr();
        McEstimate {
            p_hat: mean,
            stderr: se,
            n: m.n,
            seed,
            ci95: [mean - 1.96 * se, mean + 1.96 * se],
        }
    }
}

/// Running first and second moments, merged with Chan's update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64;
        self.n = n;
    }

    fn mean_stderr(&self) -> (f64, f64) {
        if self.n < 2 {
            return (self.mean, 0.0);
        }
        let var = self.m2 / (self.n - 1) as f64;
        (self.mean, (var / self.n as f64).sqrt())
    }
}

/// The random stream of replication `index` under root `seed`.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `n` replications in parallel and folds them deterministically.
fn run<A, F>(n: u64, seed: u64, step: F, merge: fn(&mut A, A)) -> Result<A>
where
    A: Default + Send,
    F: Fn(&mut A, &mut ChaCha8Rng) -> Result<()> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = A::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                step(&mut acc, &mut replication_rng(seed, i))?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = A::default();
    for p in parts {
        merge(&mut total, p);
    }
    Ok(total)
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(())
}

/// Simulates one cycle until `S_k <= -z`.
pub fn simulate_cycle<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    z: f64,
    rng: &mut R,
) -> Result<CycleStats> {
    if !(z > 0.0) {
        return Err(invalid(format!("z must be positive, got {z}")));
    }
    spec.validate()?;
    cycle_unchecked(spec, z, rng)
}

fn cycle_unchecked<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    z: f64,
    rng: &mut R,
) -> Result<CycleStats> {
    let mut s = 0.0;
    let mut max = f64::NEG_INFINITY;
    let mut k = 0u64;
    while k < STEP_CAP {
        s += spec.sample(rng);
        k += 1;
        max = max.max(s);
        if s <= -z {
            return Ok(CycleStats {
                tau: k,
                cycle_max: max,
                overshoot: -z - s,
            });
        }
    }
    Err(Error::StepLimitExceeded { steps: STEP_CAP })
}

/// Fraction of `n` cycles whose maximum exceeds `x`.
pub fn estimate_mtau_tail(
    spec: &DistributionSpec,
    z: f64,
    x: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_n(n)?;
    if !(z > 0.0) {
        return Err(invalid(format!("z must be positive, got {z}")));
    }
    spec.validate()?;
    // Stopping at the first exceedance does not change the indicator.
    let hits = run(
        n,
        seed,
        |hits: &mut u64, rng| {
            let mut s = 0.0;
            for _ in 0..STEP_CAP {
                s += spec.sample(rng);
                if s > x {
                    *hits += 1;
                    return Ok(());
                }
                if s <= -z {
                    return Ok(());
                }
            }
            Err(Error::StepLimitExceeded { steps: STEP_CAP })
        },
        |a, b| *a += b,
    )?;
    Ok(McEstimate::proportion(hits, n, seed))
}

/// Default stopping margin `50 / a`.
pub fn default_stop_margin(spec: &DistributionSpec) -> Result<f64> {
    Ok(50.0 / spec.validate()?)
}

/// Estimates `P(M > x)`; each replication stops at the first exceedance or
/// once `S_k <= -(x + stop_margin)`. The truncation bias is downward.
pub fn estimate_m_tail(
    spec: &DistributionSpec,
    x: f64,
    n: u64,
    seed: u64,
    stop_margin: f64,
) -> Result<McEstimate> {
    check_n(n)?;
    if !(stop_margin > 0.0) {
        return Err(invalid(format!(
            "stop_margin must be positive, got {stop_margin}"
        )));
    }
    spec.validate()?;
    let floor = -(x.max(0.0) + stop_margin);
    let hits = run(
        n,
        seed,
        |hits: &mut u64, rng| {
            // M >= S_0 = 0
            if x < 0.0 {
                *hits += 1;
                return Ok(());
            }
            let mut s = 0.0;
            for _ in 0..STEP_CAP {
                s += spec.sample(rng);
                if s > x {
                    *hits += 1;
                    return Ok(());
                }
                if s <= floor {
                    return Ok(());
                }
            }
            Err(Error::StepLimitExceeded { steps: STEP_CAP })
        },
        |a, b| *a += b,
    )?;
    Ok(McEstimate::proportion(hits, n, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauOvershoot {
    pub tau: McEstimate,
    pub overshoot: McEstimate,
    /// Sample mean of `a τ - R_z - z` (zero in expectation).
    pub wald_gap: f64,
    /// Standard error of the per-cycle `a τ - R_z`.
    pub wald_stderr: f64,
    pub wald: Check,
}

#[derive(Default)]
struct TauAcc {
    tau: Moments,
    over: Moments,
    diff: Moments,
}

/// Sample means of `τ_z` and `R_z` over `n` cycles, with the Wald check
/// `|a τ̂ - z - R̂| <= 4 stderr`.
pub fn estimate_tau_overshoot(
    spec: &DistributionSpec,
    z: f64,
    n: u64,
    seed: u64,
) -> Result<TauOvershoot> {
    check_n(n)?;
    if !(z > 0.0) {
        return Err(invalid(format!("z must be positive, got {z}")));
    }
    let a = spec.validate()?;
    let acc = run(
        n,
        seed,
        |acc: &mut TauAcc, rng| {
            let c = cycle_unchecked(spec, z, rng)?;
            acc.tau.push(c.tau as f64);
            acc.over.push(c.overshoot);
            acc.diff.push(a * c.tau as f64 - c.overshoot);
            Ok(())
        },
        |t, o| {
            t.tau.merge(&o.tau);
            t.over.merge(&o.over);
            t.diff.merge(&o.diff);
        },
    )?;
    let (d, se) = acc.diff.mean_stderr();
    let gap = d - z;
    Ok(TauOvershoot {
        tau: McEstimate::mean(&acc.tau, seed),
        overshoot: McEstimate::mean(&acc.over, seed),
        wald_gap: gap,
        wald_stderr: se,
        wald: Check::new(
            "|a tau_hat - z - R_hat| <= 4 stderr",
            gap.abs() <= 4.0 * se,
            format!("gap = {gap:.6e}, stderr = {se:.6e}"),
        ),
    })
}
