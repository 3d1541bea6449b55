// Heavy-traffic ratio tables for `X^(a) = X^(0) - a` on both tracks.
//
// `cargo run --example heavy_traffic`

use driftbound::heavytraffic::{
    ht_ratio_experiment, t4_condition, write_csv, ExperimentConfig, HeavyTrafficFamily, Schedule,
    ZRule,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let finite_var = HeavyTrafficFamily::centered_pareto(
        3.0,
        1.0,
        vec![0.5, 0.2, 0.1, 0.05],
        Schedule::LogScaled { c: 10.0 },
    )?;
    let cond = t4_condition(
        3.0,
        finite_var.sigma2().unwrap_or(f64::NAN),
        &finite_var.x_schedule,
        &finite_var.drifts,
    )?;
    println!("schedule threshold {:.4}", cond.threshold);
    let rows = ht_ratio_experiment(
        &finite_var,
        &ExperimentConfig {
            z_rule: ZRule::SqrtScaled { c: 1.0 },
            theta: 0.9,
            t: Some(2.9),
            n_mc: 2_000,
            seed: 1,
        },
    )?;
    write_csv(&rows, std::io::stdout().lock())?;

    let infinite_var = HeavyTrafficFamily::centered_pareto(
        1.5,
        1.0,
        vec![0.5, 0.2, 0.1, 0.05],
        Schedule::Power {
            c: 1.0,
            kappa: 10.0,
        },
    )?;
    let rows = ht_ratio_experiment(
        &infinite_var,
        &ExperimentConfig {
            z_rule: ZRule::SqrtScaled { c: 1.0 },
            theta: 0.6,
            t: None,
            n_mc: 0,
            seed: 1,
        },
    )?;
    write_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
