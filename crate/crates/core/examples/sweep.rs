// Drives the command-line front end in-process: a bound, a sweep over
// (θ, z), and a verification suite.
//
// `cargo run --example sweep`

use driftbound::cli::main_with_args;

pub fn run() -> Result<(), String> {
    let dist = r#"{"family":"pareto_shift","params":{"r":3.0,"scale":1.0,"shift":2.0}}"#;
    let commands: [&[&str]; 3] = [
        &[
            "driftbound",
            "bound",
            "--theorem",
            "t3",
            "--dist",
            dist,
            "--x",
            "1000",
            "--z",
            "20",
            "--theta",
            "0.5",
            "--t",
            "2",
            "--format",
            "csv",
        ],
        &[
            "driftbound",
            "sweep",
            "--theorem",
            "series",
            "--dist",
            dist,
            "--x-grid",
            "100:10000:3",
            "--log-grid",
            "--theta-grid",
            "0.3,0.5,0.7",
            "--z-grid",
            "5,20",
            "--t",
            "2",
            "--format",
            "csv",
        ],
        &[
            "driftbound",
            "verify",
            "--suite",
            "wald",
            "--n",
            "2000",
            "--seed",
            "3",
        ],
    ];
    for args in commands {
        println!("$ {}", args[1..].join(" "));
        let code = main_with_args(args.iter().copied());
        if code != 0 {
            return Err(format!("exit code {code}"));
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
