// Closed-form and series bounds on P(M > x).
//
// `cargo run --example global_bounds`

use driftbound::bounds::{
    bound_max_series, bound_max_t3_best_alpha, tau_mean_ub, BoundInputs, OvershootMethod,
};
use driftbound::montecarlo::exact_lattice_oracle;
use driftbound::{DistributionSpec, Result};

pub fn run() -> Result<()> {
    let lattice = DistributionSpec::two_point(0.25, 1.0, 1.0);
    let (z, theta) = (5.0, 0.5);
    let tau = tau_mean_ub(&lattice, z, OvershootMethod::Lorden)?;
    println!("two-point walk, z = {z}, theta = {theta}");
    for x in [20.0, 40.0, 80.0] {
        let inp = BoundInputs::global(x, z, theta, 2.0, tau);
        let exact = exact_lattice_oracle(0.25, z, x)?.m_tail;
        let t3 = bound_max_t3_best_alpha(&lattice, &inp)?;
        let s = bound_max_series(&lattice, &inp)?;
        println!(
            "  x = {x:>4}: exact {exact:.3e}  closed form {:.3e}  series {:.3e} ({} terms)",
            t3.value,
            s.value,
            s.term("n_terms").unwrap_or(0.0)
        );
    }

    let pareto = DistributionSpec::pareto_shift(3.0, 1.0, 2.0);
    let a = pareto.validate()?;
    let z = 20.0;
    let tau = tau_mean_ub(&pareto, z, OvershootMethod::Lorden)?;
    println!("pareto r = 3, z = {z}; G(x)/a is the large-x asymptote");
    for x in [1e3, 1e4, 1e5] {
        let inp = BoundInputs::global(x, z, 0.5, 2.0, tau);
        let s = bound_max_series(&pareto, &inp)?;
        let trunc = bound_max_series(&pareto, &inp.truncated(true))?;
        println!(
            "  x = {x:>7}: series {:.3e}  truncated series {:.3e}  G(x)/a {:.3e}",
            s.value,
            trunc.value,
            pareto.integrated_tail(x) / a
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
