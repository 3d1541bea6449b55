// Overshoot bounds and E[τ_z] bounds against simulated cycle statistics.
//
// `cargo run --example overshoot`

use driftbound::bounds::{overshoot_ub, tau_mean_ub, OvershootMethod};
use driftbound::montecarlo::estimate_tau_overshoot;
use driftbound::{DistributionSpec, Result};

pub fn run() -> Result<()> {
    let spec = DistributionSpec::pareto_shift(3.0, 1.0, 2.0);
    let z = 10.0;
    let methods = [
        ("lorden", OvershootMethod::Lorden),
        ("mogulskii", OvershootMethod::mogulskii()),
        ("prop1 t=1.5", OvershootMethod::Prop1 { t: 1.5 }),
    ];
    let mc = estimate_tau_overshoot(&spec, z, 20_000, 5)?;
    println!(
        "simulated: E[tau] = {:.3} +- {:.3}, E[R] = {:.3} +- {:.3}, {}",
        mc.tau.p_hat, mc.tau.stderr, mc.overshoot.p_hat, mc.overshoot.stderr, mc.wald
    );
    for (name, m) in methods {
        // Mogul'skii needs E|X|^3, which is infinite at tail index 3
        match (overshoot_ub(&spec, z, m), tau_mean_ub(&spec, z, m)) {
            (Ok(r), Ok(t)) => println!("{name:>12}: E[R] <= {r:.4}, E[tau] <= {t:.4}"),
            (Err(e), _) | (_, Err(e)) => println!("{name:>12}: {e}"),
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
