// Monte Carlo estimates of P(M_τ > x), P(M > x) and E[τ_z], with the exact
// lattice values alongside.
//
// `cargo run --example simulate`

use driftbound::montecarlo::{
    default_stop_margin, estimate_m_tail, estimate_mtau_tail, estimate_tau_overshoot,
    exact_lattice_oracle,
};
use driftbound::{DistributionSpec, Result};

pub fn run() -> Result<()> {
    let spec = DistributionSpec::two_point(0.25, 1.0, 1.0);
    let n = 100_000;
    let exact = exact_lattice_oracle(0.25, 5.0, 3.0)?;
    let mtau = estimate_mtau_tail(&spec, 5.0, 3.0, n, 42)?;
    let m = estimate_m_tail(&spec, 3.0, n, 42, default_stop_margin(&spec)?)?;
    let tau = estimate_tau_overshoot(&spec, 5.0, n, 42)?;
    println!(
        "P(M_tau > 3): {:.5} +- {:.5}  exact {:.5}",
        mtau.p_hat, mtau.stderr, exact.mtau_tail
    );
    println!(
        "P(M > 3):     {:.5} +- {:.5}  exact {:.5}",
        m.p_hat, m.stderr, exact.m_tail
    );
    println!(
        "E[tau_5]:     {:.4} +- {:.4}  exact {:.4}",
        tau.tau.p_hat, tau.tau.stderr, exact.tau_mean
    );
    println!("E[R_5]:       {}", tau.overshoot.p_hat);

    let normal = DistributionSpec::normal(-1.0, 1.0);
    let r = estimate_tau_overshoot(&normal, 3.0, n, 7)?;
    println!(
        "normal(-1,1), z = 3: E[tau] = {:.4}, E[R] = {:.4}, {}",
        r.tau.p_hat, r.overshoot.p_hat, r.wald
    );
    println!("{}", serde_json::to_string(&m).expect("serializable"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
