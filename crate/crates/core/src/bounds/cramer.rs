use crate::bounds::{check_positive, require, BoundResult, Regime};
use crate::distributions::DistributionSpec;
use crate::error::{Check, Result};

const ROOT_TOL: f64 = 1e-12;

/// Positive root `h*` of `E[e^{hX}] = 1`, or `None` when the law has no
/// exponential moments. The returned value is the lower end of the final
/// bisection bracket, so `E[e^{h* X}] <= 1` holds at the returned point.
pub fn lundberg_exponent(spec: &DistributionSpec) -> Result<Option<f64>> {
    spec.validate()?;
    if !spec.has_exponential_moments() {
        return Ok(None);
    }
    let f = |h: f64| spec.log_mgf(h).unwrap_or(f64::INFINITY);
    let cap = spec.mgf_abscissa();

    let mut lo = 0.0;
    let mut hi = if cap.is_finite() { 0.5 * cap } else { 1.0 };
    let mut guard = 0;
    while f(hi) <= 0.0 {
        lo = hi;
        hi = if cap.is_finite() {
            0.5 * (hi + cap)
        } else {
            2.0 * hi
        };
        guard += 1;
        if guard > 2000 || !(hi < cap) {
            return Ok(None);
        }
    }
    while hi - lo > ROOT_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// `P(M > x) <= e^{-h* x}` for light-tailed laws; `None` when not applicable.
pub fn cramer_lundberg(spec: &DistributionSpec, x: f64) -> Result<Option<BoundResult>> {
    let validity = require(vec![check_positive("x", x)])?;
    let Some(h) = lundberg_exponent(spec)? else {
        return Ok(None);
    };
    let mut validity = validity;
    let log_mgf = spec.log_mgf(h).unwrap_or(f64::INFINITY);
    validity.push(Check::new(
        "E[exp(h* X)] <= 1",
        log_mgf <= 1e-12,
        format!("log E[exp(h* X)] = {log_mgf:.3e}"),
    ));
    let value = (-h * x).exp();
    Ok(Some(BoundResult::new(
        value,
        Regime::CramerLundberg,
        vec![("h_star", h), ("log_mgf_at_h_star", log_mgf)],
        validity,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_root_is_log3() {
        let spec = DistributionSpec::two_point(0.25, 1.0, 1.0);
        let h = lundberg_exponent(&spec).unwrap().unwrap();
        assert!((h - 3f64.ln()).abs() < 1e-11);
        let r = cramer_lundberg(&spec, 5.0).unwrap().unwrap();
        assert!((r.value - 3f64.powi(-5)).abs() < 1e-12);
        assert!((r.value - 4.1152e-3).abs() < 1e-7);
    }

    #[test]
    fn normal_root_is_two() {
        let spec = DistributionSpec::normal(-1.0, 1.0);
        let r = cramer_lundberg(&spec, 3.0).unwrap().unwrap();
        assert!((r.term("h_star").unwrap() - 2.0).abs() < 1e-11);
        assert!((r.value - (-6f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn exponential_root_inside_abscissa() {
        // X = E - 1.5, E ~ Exp(1): e^{-1.5h}/(1-h) = 1
        let spec = DistributionSpec::exponential_shift(1.0, 1.5);
        let h = lundberg_exponent(&spec).unwrap().unwrap();
        assert!(h > 0.0 && h < 1.0);
        assert!(((-1.5 * h).exp() / (1.0 - h) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pareto_not_applicable() {
        let spec = DistributionSpec::pareto_shift(3.0, 1.0, 2.0);
        assert!(cramer_lundberg(&spec, 5.0).unwrap().is_none());
    }
}
