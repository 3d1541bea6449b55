// Moments, tails and truncated moments for the four increment laws.
//
// `cargo run --example distributions`

use driftbound::{DistributionSpec, Result};

pub fn run() -> Result<()> {
    let laws = [
        DistributionSpec::two_point(0.25, 1.0, 1.0),
        DistributionSpec::pareto_shift(3.0, 1.0, 2.0),
        DistributionSpec::exponential_shift(1.0, 1.5),
        DistributionSpec::normal(-1.0, 1.0),
    ];
    for spec in &laws {
        let a = spec.validate()?;
        let prof = spec.moment_profile(2.0)?;
        let tm = spec.truncated_moments(10.0, 2.0)?;
        println!("{}", serde_json::to_string(spec).expect("serializable"));
        println!(
            "  a = {a:.4}  A_2 = {:.4}  A_2+ = {:.4}  A_2- = {:.4}  Var = {:?}",
            prof.a_t, prof.a_t_plus, prof.a_t_minus, prof.var
        );
        println!(
            "  P(X > 5) = {:.4e}  G(5) = {:.4e}  E[X, |X|<=10] = {:.4}  tail index = {:?}",
            spec.tail(5.0),
            spec.integrated_tail(5.0),
            tm.mean_trunc,
            spec.tail_index()
        );
    }
    // moments of order r and beyond do not exist for the Pareto law
    let err = laws[1].moment_profile(3.0).unwrap_err();
    println!("pareto, t = 3: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
