// The Cramér–Lundberg bound e^{-h* x} as a light-tailed baseline.
//
// `cargo run --example cramer_baseline`

use driftbound::bounds::{
    bound_max_series, cramer_lundberg, lundberg_exponent, tau_mean_ub, BoundInputs, OvershootMethod,
};
use driftbound::{DistributionSpec, Result};

pub fn run() -> Result<()> {
    let laws = [
        ("two_point", DistributionSpec::two_point(0.25, 1.0, 1.0)),
        ("exponential", DistributionSpec::exponential_shift(1.0, 1.5)),
        ("normal", DistributionSpec::normal(-1.0, 1.0)),
        ("pareto", DistributionSpec::pareto_shift(3.0, 1.0, 2.0)),
    ];
    for (name, spec) in &laws {
        match lundberg_exponent(spec)? {
            None => println!("{name}: no exponential moments, not applicable"),
            Some(h) => {
                let tau = tau_mean_ub(spec, 5.0, OvershootMethod::Lorden)?;
                print!("{name}: h* = {h:.6}");
                for x in [5.0, 20.0] {
                    let cl = cramer_lundberg(spec, x)?.expect("light tail");
                    let s = bound_max_series(spec, &BoundInputs::global(x, 5.0, 0.5, 2.0, tau));
                    let s = s
                        .map(|b| format!("{:.3e}", b.value))
                        .unwrap_or_else(|_| "invalid".into());
                    print!("  x = {x}: CL {:.3e}, series {s}", cl.value);
                }
                println!();
            }
        }
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
