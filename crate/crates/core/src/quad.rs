//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! Every moment integral in this crate is reduced to a finite interval
//! (heavy power tails are handled in closed form by the callers), so no
//! infinite-range transform is needed here.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const REL_TOL: f64 = 1e-10;
pub const ABS_FLOOR: f64 = 1e-300;
const MAX_INTERVALS: usize = 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_err: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Piece {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Piece {
        lo,
        hi,
        value: k * h,
        err: ((k - g) * h).abs(),
    }
}

/// Integrates `f` over `[lo, hi]`, splitting first at the given interior
/// breakpoints (kinks, sign changes, scale changes of the integrand).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    rel_tol: f64,
) -> Quadrature {
    if !(hi > lo) {
        return Quadrature {
            value: 0.0,
            abs_err: 0.0,
            converged: true,
        };
    }
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut left = lo;
    for right in cuts.into_iter().chain(std::iter::once(hi)) {
        heap.push(kronrod(&f, left, right));
        left = right;
    }

    loop {
        let (value, err) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err));
        let target = (rel_tol * value.abs()).max(ABS_FLOOR);
        if err <= target || !err.is_finite() {
            return Quadrature {
                value,
                abs_err: err,
                converged: err.is_finite(),
            };
        }
        if heap.len() >= MAX_INTERVALS {
            return Quadrature {
                value,
                abs_err: err,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // Interval exhausted at machine precision; accept its estimate.
            heap.push(Piece { err: 0.0, ..worst });
            continue;
        }
        heap.push(kronrod(&f, worst.lo, mid));
        heap.push(kronrod(&f, mid, worst.hi));
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    integrate_with_breaks(f, lo, hi, &[], REL_TOL).value
}
