//! Exact first-passage quantities for the ±1 lattice walk, from tridiagonal
//! linear solves of the absorbing-chain equations.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeExact {
    /// `P(M_τ > x)`.
    pub mtau_tail: f64,
    /// `P(M > x)`.
    pub m_tail: f64,
    /// `E[τ_z]`.
    pub tau_mean: f64,
}

/// Solves `sub_i v_{i-1} + diag_i v_i + sup_i v_{i+1} = rhs_i` (Thomas).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut v = vec![0.0; n];
    v[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        v[i] = d[i] - c[i] * v[i + 1];
    }
    v
}

/// Probability that the walk from 0 reaches `hi` before `lo` (`lo < 0 < hi`).
fn hit_before(p: f64, lo: i64, hi: i64) -> f64 {
    // Unknowns h(s) for s in lo+1..hi-1; h(lo) = 0, h(hi) = 1.
    let q = 1.0 - p;
    let n = (hi - lo - 1) as usize;
    let sub = vec![-q; n];
    let diag = vec![1.0; n];
    let sup = vec![-p; n];
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = p;
    let h = thomas(&sub, &diag, &sup, &rhs);
    h[(-lo - 1) as usize]
}

/// Far barrier distance for the unbounded side: the neglected mass is of
/// order `(p/q)^L`.
fn far(p: f64) -> i64 {
    let log_ratio = ((1.0 - p) / p).ln();
    ((800.0 / log_ratio).ceil() as i64).clamp(200, 2_000_000)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 0.5) {
        return Err(invalid(format!(
            "lattice oracle needs p in (0, 1/2), got {p}"
        )));
    }
    Ok(())
}

/// `P(M >= k)` for the ±1 walk with up-probability `p`.
pub fn lattice_m_at_least(p: f64, k: u64) -> Result<f64> {
    check_p(p)?;
    if k == 0 {
        return Ok(1.0);
    }
    Ok(hit_before(p, -far(p), k as i64))
}

/// Exact `P(M_τ > x)`, `P(M > x)` and `E[τ_z]` for the walk with steps
/// `+1` (probability `p`) and `-1`.
pub fn exact_lattice_oracle(p: f64, z: f64, x: f64) -> Result<LatticeExact> {
    check_p(p)?;
    if !(z > 0.0) || !(x >= 0.0) || !z.is_finite() || !x.is_finite() {
        return Err(invalid(format!(
            "need z > 0 and x >= 0, got z = {z}, x = {x}"
        )));
    }
    // S_k <= -z iff S_k <= -ceil(z); M > x iff M >= floor(x) + 1.
    let zb = z.ceil() as i64;
    let k = x.floor() as i64 + 1;
    let mtau_tail = hit_before(p, -zb, k);
    let m_tail = lattice_m_at_least(p, k as u64)?;

    // g(s) = 1 + p g(s+1) + q g(s-1) on -z < s <= top, g(-z) = 0,
    // holding at the top level.
    let q = 1.0 - p;
    let top = far(p);
    let n = (top + zb) as usize;
    let sub = vec![-q; n];
    let mut diag = vec![1.0; n];
    let sup = vec![-p; n];
    diag[n - 1] = 1.0 - p;
    let rhs = vec![1.0; n];
    let g = thomas(&sub, &diag, &sup, &rhs);
    let tau_mean = g[(zb - 1) as usize];
    Ok(LatticeExact {
        mtau_tail,
        m_tail,
        tau_mean,
    })
}
