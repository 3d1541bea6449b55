//! Structural invariants of the bounds and the estimators.

use driftbound::bounds::{
    bound_max_series, bound_max_t3, bound_mtau_t1, bound_mtau_t2, lemma1_bound, rate_t1, rates_t2,
    tau_mean_ub, BoundInputs, BoundResult, Moments, OvershootMethod,
};
use driftbound::heavytraffic::{
    ht_ratio_experiment, ExperimentConfig, HeavyTrafficFamily, Schedule, ZRule,
};
use driftbound::montecarlo::{estimate_m_tail, estimate_mtau_tail, estimate_tau_overshoot};
use driftbound::verify::montecarlo_suite;
use driftbound::{DistributionSpec, Result};
use proptest::prelude::*;

type BoundFn<'a> = Box<dyn Fn(f64) -> Option<f64> + 'a>;

fn laws() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::two_point(0.25, 1.0, 1.0),
        DistributionSpec::two_point(0.1, 2.0, 0.5),
        DistributionSpec::pareto_shift(3.0, 1.0, 2.0),
        DistributionSpec::pareto_shift(2.5, 2.0, 4.0),
        DistributionSpec::exponential_shift(1.0, 1.5),
        DistributionSpec::normal(-1.0, 1.0),
    ]
}

fn ok(r: Result<BoundResult>) -> Option<f64> {
    r.ok().map(|b| b.value)
}

fn arb_law() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (0.05f64..0.45, 0.5f64..3.0).prop_map(|(p, u)| {
            // d chosen so the mean is negative
            let d = u * p / (1.0 - p) * 1.5 + 0.1;
            DistributionSpec::two_point(p, u, d)
        }),
        (1.3f64..5.0, 0.5f64..2.0, 0.1f64..2.0).prop_map(|(r, scale, extra)| {
            DistributionSpec::pareto_shift(r, scale, r * scale / (r - 1.0) + extra)
        }),
        (0.3f64..3.0, 0.1f64..2.0).prop_map(|(rate, extra)| {
            DistributionSpec::exponential_shift(rate, 1.0 / rate + extra)
        }),
        (-3.0f64..-0.1, 0.2f64..3.0).prop_map(|(mu, sigma)| DistributionSpec::normal(mu, sigma)),
    ]
}

#[test]
fn nonincreasing_in_x() {
    let xs: Vec<f64> = (0..40).map(|i| 5.0 * 1.2f64.powi(i)).collect();
    for spec in laws() {
        let tau = tau_mean_ub(&spec, 5.0, OvershootMethod::Lorden).unwrap();
        let r = spec.tail_index().unwrap_or(f64::INFINITY);
        let t2 = (2.0 + r) / 2.0;
        let evals: Vec<(&str, BoundFn)> = vec![
            (
                "t1",
                Box::new(|x| ok(bound_mtau_t1(&spec, &BoundInputs::cycle(x, 5.0, 2.0, tau)))),
            ),
            (
                "t2",
                Box::new(|x| {
                    ok(bound_mtau_t2(
                        &spec,
                        &BoundInputs::cycle(x, 5.0, t2.min(3.0), tau),
                    ))
                }),
            ),
            (
                "t3",
                Box::new(|x| {
                    ok(bound_max_t3(
                        &spec,
                        &BoundInputs::global(x, 5.0, 0.5, 2.0, tau),
                    ))
                }),
            ),
            (
                "series",
                Box::new(|x| {
                    ok(bound_max_series(
                        &spec,
                        &BoundInputs::global(x, 5.0, 0.5, 2.0, tau),
                    ))
                }),
            ),
        ];
        for (name, f) in evals {
            let vals: Vec<f64> = xs.iter().filter_map(|&x| f(x)).collect();
            for w in vals.windows(2) {
                assert!(
                    w[1] <= w[0] * (1.0 + 1e-9),
                    "{name} {spec:?}: {} then {}",
                    w[0],
                    w[1]
                );
            }
        }
    }
}

#[test]
fn linear_in_tau() {
    for spec in laws() {
        let r = spec.tail_index().unwrap_or(f64::INFINITY);
        let t2 = ((2.0 + r) / 2.0).min(3.0);
        for tau in [13.0, 40.0] {
            let pairs: Vec<Box<dyn Fn(f64) -> Result<BoundResult>>> = vec![
                Box::new(|tau| bound_mtau_t1(&spec, &BoundInputs::cycle(50.0, 25.0, 2.0, tau))),
                Box::new(|tau| bound_mtau_t2(&spec, &BoundInputs::cycle(500.0, 250.0, t2, tau))),
                Box::new(|tau| {
                    bound_max_t3(&spec, &BoundInputs::global(200.0, 5.0, 0.5, 2.0, tau))
                }),
                Box::new(|tau| {
                    bound_max_series(&spec, &BoundInputs::global(200.0, 5.0, 0.5, 2.0, tau))
                }),
                Box::new(|tau| {
                    let prof = spec.moment_profile(2.0)?;
                    let h = rate_t1(Moments::Full(&prof), 25.0)?.h;
                    lemma1_bound(&spec, h, 50.0, 25.0, tau)
                }),
            ];
            for f in pairs {
                if let (Ok(b1), Ok(b2)) = (f(tau), f(2.0 * tau)) {
                    assert!(
                        (b2.value - 2.0 * b1.value).abs() <= 1e-12 * b2.value.max(1e-300),
                        "{spec:?}"
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lemma1_at_h0_below_t1(spec in arb_law(), y in 1.0f64..200.0, k in 1.0f64..6.0, tau in 1.0f64..100.0) {
        let x = k * y;
        let prof = spec.moment_profile(2.0).ok();
        prop_assume!(prof.is_some());
        let prof = prof.unwrap();
        if let (Ok(rate), Ok(t1)) = (rate_t1(Moments::Full(&prof), y), bound_mtau_t1(&spec, &BoundInputs::cycle(x, y, 2.0, tau))) {
            let l1 = lemma1_bound(&spec, rate.h, x, y, tau).unwrap();
            prop_assert!(l1.value <= t1.value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rates_are_certified(spec in arb_law(), y in 0.5f64..500.0, alpha in 0.05f64..0.95) {
        let r = spec.tail_index().unwrap_or(f64::INFINITY);
        let t1 = 1.0 + 0.9 * ((r.min(2.0)) - 1.0);
        if let Ok(prof) = spec.moment_profile(t1) {
            if let Ok(rate) = rate_t1(Moments::Full(&prof), y) {
                prop_assert!(spec.mgf_truncated(rate.h, y) <= 1.0 + 1e-12);
            }
        }
        if r > 2.2 {
            let t = (2.0 + r.min(4.0)) / 2.0;
            let prof = spec.moment_profile(t).unwrap();
            if let Ok(rates) = rates_t2(Moments::Full(&prof), y, alpha) {
                prop_assert!(spec.mgf_truncated(rates.h(), y) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn series_below_closed_form(spec in arb_law(), x in 5.0f64..5e4, z in 1.0f64..50.0, theta in 0.2f64..0.9) {
        let tau = tau_mean_ub(&spec, z, OvershootMethod::Lorden);
        prop_assume!(tau.is_ok());
        let inp = BoundInputs::global(x, z, theta, 2.0, tau.unwrap());
        if let (Ok(s), Ok(c)) = (bound_max_series(&spec, &inp), bound_max_t3(&spec, &inp)) {
            prop_assert!(s.value <= c.value * (1.0 + 1e-12), "series {} closed {}", s.value, c.value);
        }
    }
}

#[test]
fn continuous_laws_dominate_monte_carlo() {
    let rows = montecarlo_suite(&driftbound::verify::VerifyOptions {
        seed: 9,
        n_mc: 20_000,
    })
    .unwrap();
    assert!(rows.len() > 30);
    let bad: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn truncation_bias_shrinks_with_margin() {
    let spec = DistributionSpec::pareto_shift(3.0, 1.0, 2.0);
    let small = estimate_m_tail(&spec, 5.0, 20_000, 4, 2.0).unwrap();
    let large = estimate_m_tail(&spec, 5.0, 20_000, 4, 100.0).unwrap();
    assert!(large.p_hat >= small.p_hat - 3.0 * small.stderr);
    // same streams: every exceedance seen with the small margin is seen with the large one
    assert!(large.p_hat >= small.p_hat);
}

#[test]
fn disjoint_seeds_agree_statistically() {
    let spec = DistributionSpec::exponential_shift(1.0, 1.5);
    let a = estimate_mtau_tail(&spec, 5.0, 3.0, 40_000, 100).unwrap();
    let b = estimate_mtau_tail(&spec, 5.0, 3.0, 40_000, 200).unwrap();
    assert_ne!(a.p_hat, b.p_hat);
    let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.p_hat - b.p_hat).abs() <= 4.0 * se);
}

#[test]
fn tau_over_z_approaches_inverse_drift() {
    let fam =
        HeavyTrafficFamily::centered_pareto(3.0, 1.0, vec![0.1], Schedule::LogScaled { c: 10.0 })
            .unwrap();
    let a = 0.1;
    let spec = fam.at(a).unwrap();
    let z = 20.0 / a;
    let r = estimate_tau_overshoot(&spec, z, 4_000, 12).unwrap();
    assert!(
        (r.tau.p_hat / z * a - 1.0).abs() <= 0.05,
        "{}",
        r.tau.p_hat / z
    );
}

#[test]
fn heavy_traffic_bounds_dominate_estimates() {
    let t4 =
        HeavyTrafficFamily::centered_pareto(3.0, 1.0, vec![0.2], Schedule::LogScaled { c: 10.0 })
            .unwrap();
    let cfg = ExperimentConfig {
        z_rule: ZRule::SqrtScaled { c: 1.0 },
        theta: 0.9,
        t: Some(2.9),
        n_mc: 30_000,
        seed: 5,
    };
    let t5 = HeavyTrafficFamily::centered_pareto(
        1.5,
        1.0,
        vec![0.5],
        Schedule::Power {
            c: 1.0,
            kappa: 10.0,
        },
    )
    .unwrap();
    let cfg5 = ExperimentConfig {
        z_rule: ZRule::SqrtScaled { c: 1.0 },
        theta: 0.6,
        t: None,
        n_mc: 2_000,
        seed: 5,
    };
    let mut checked = 0;
    for row in ht_ratio_experiment(&t4, &cfg)
        .unwrap()
        .into_iter()
        .chain(ht_ratio_experiment(&t5, &cfg5).unwrap())
    {
        if let (Some(b), Some(m), Some(se)) = (row.bound_value, row.mc_estimate, row.mc_stderr) {
            assert!(b >= m - 3.0 * se, "{row:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 2);
}
