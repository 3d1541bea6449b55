// Bounds on P(M_τ > x) for one cycle, against exact lattice values.
//
// `cargo run --example cycle_bounds`

use driftbound::bounds::{
    bound_mtau_t1, bound_mtau_t2_best_alpha, lemma1_bound, rate_t1, tau_mean_ub, BoundInputs,
    Moments, OvershootMethod,
};
use driftbound::montecarlo::exact_lattice_oracle;
use driftbound::{DistributionSpec, Result};

pub fn run() -> Result<()> {
    let spec = DistributionSpec::two_point(0.25, 1.0, 1.0);
    let z = 5.0;
    let tau = tau_mean_ub(&spec, z, OvershootMethod::Lorden)?;
    let prof = spec.moment_profile(2.0)?;
    println!("E[tau_{z}] <= {tau}");
    println!(
        "{:>4} {:>12} {:>12} {:>12} {:>12}",
        "x", "exact", "lemma1", "T1", "T2 (t=3)"
    );
    for x in [10.0, 20.0, 30.0, 40.0] {
        let y = x / 2.0;
        let exact = exact_lattice_oracle(0.25, z, x)?.mtau_tail;
        let h0 = rate_t1(Moments::Full(&prof), y)?.h;
        let l1 = lemma1_bound(&spec, h0, x, y, tau)?;
        let t1 = bound_mtau_t1(&spec, &BoundInputs::cycle(x, y, 2.0, tau))?;
        let t2 = bound_mtau_t2_best_alpha(&spec, &BoundInputs::cycle(x, y, 3.0, tau))?;
        println!(
            "{x:>4} {exact:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} ({})",
            l1.value, t1.value, t2.value, t2.regime
        );
    }
    // below the single-rate threshold the bound is refused with the failing check
    if let Err(e) = bound_mtau_t1(&spec, &BoundInputs::cycle(2.0, 2.0, 2.0, tau)) {
        println!("x = y = 2: {e}");
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
