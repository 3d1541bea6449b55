//! Command-line front end. The `driftbound` binary only forwards to [`main_with_args`].
//!
//! Exit codes: 0 on success, 2 on invalid input or failed preconditions,
//! 1 on runtime failures (I/O, step limits).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{
    bound_max_series, bound_max_t3, bound_max_t3_best_alpha, bound_mtau_t1, bound_mtau_t2,
    bound_mtau_t2_best_alpha, cramer_lundberg, lemma1_bound, rate_t1, tau_mean_ub, BoundInputs,
    BoundResult, Moments, OvershootMethod,
};
use crate::distributions::DistributionSpec;
use crate::error::{invalid, Error, Result};
use crate::heavytraffic::{self, fmt_float, ExperimentConfig, HeavyTrafficFamily, Schedule, ZRule};
use crate::montecarlo::{
    default_stop_margin, estimate_m_tail, estimate_mtau_tail, estimate_tau_overshoot,
};
use crate::verify::{self, Suite, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "driftbound",
    version,
    about = "Tail bounds for maxima of negative-drift random walks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound.
    Bound(BoundArgs),
    /// Monte Carlo estimates.
    Simulate(SimulateArgs),
    /// Minimum valid bound per x over a parameter grid.
    Sweep(SweepArgs),
    /// Heavy-traffic ratio table.
    HeavyTraffic(HeavyTrafficArgs),
    /// Bound-versus-oracle suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Lemma1,
    T1,
    T2,
    T3,
    Series,
    Cramer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TauMethod {
    Lorden,
    Mogulskii,
    Prop1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Increment law: a JSON file path or inline JSON.
    #[arg(long)]
    pub dist: String,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    /// Bound on E[τ_z] used by the bounds; overrides --tau-method.
    #[arg(long)]
    pub tau_mean: Option<f64>,
    #[arg(long, value_enum, default_value_t = TauMethod::Lorden)]
    pub tau_method: TauMethod,
    /// Constant in the Mogul'skii overshoot bound.
    #[arg(long, default_value_t = 2.0)]
    pub mogulskii_a: f64,
    /// Moment order for the Prop1 overshoot bound (defaults to --t).
    #[arg(long)]
    pub prop1_t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Split parameter; without it the two-rate bounds minimize over a grid.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    /// Rate for lemma1; defaults to the single-rate choice at y.
    #[arg(long)]
    pub h: Option<f64>,
    /// Use truncated moments.
    #[arg(long)]
    pub truncated: bool,
    #[command(flatten)]
    pub tau: TauArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// P(M > x)
    M,
    /// P(M_τ > x)
    Mtau,
    /// E[τ_z] and E[R_z]
    Tau,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Target::M)]
    pub target: Target,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, env = "DRIFTBOUND_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Defaults to 50 / a.
    #[arg(long)]
    pub stop_margin: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    /// Comma list or lo:hi:n (geometric when both ends are positive and `--log-grid`).
    #[arg(long)]
    pub x_grid: String,
    /// Truncation levels as fractions of x (cycle bounds).
    #[arg(long, default_value = "0.25,0.5,0.75,1")]
    pub y_frac_grid: String,
    #[arg(long, default_value = "0.25,0.5,0.75,0.9")]
    pub theta_grid: String,
    #[arg(long, default_value = "5")]
    pub z_grid: String,
    #[arg(long, default_value = "0.5")]
    pub alpha_grid: String,
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    #[arg(long)]
    pub truncated: bool,
    #[arg(long)]
    pub log_grid: bool,
    #[command(flatten)]
    pub tau: TauArgs,
}

#[derive(Debug, Args)]
pub struct HeavyTrafficArgs {
    /// Tail index of the centered Pareto base.
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value = "0.5,0.2,0.1,0.05")]
    pub drifts: String,
    /// `log:c` for c a^-1 ln(1/a) or `power:c:kappa` for c a^-kappa.
    #[arg(long, default_value = "log:10")]
    pub schedule: String,
    /// Constant in z_a = c sqrt(x_a / a).
    #[arg(long, default_value_t = 10.0)]
    pub z_const: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, env = "DRIFTBOUND_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Domination,
    Montecarlo,
    Wald,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, env = "DRIFTBOUND_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub n: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses arguments, runs, prints errors to stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command; returns the exit code (verify reports 2 when a row fails).
pub fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Bound(a) => run_bound(a).map(|_| 0),
        Command::Simulate(a) => run_simulate(a).map(|_| 0),
        Command::Sweep(a) => run_sweep(a).map(|_| 0),
        Command::HeavyTraffic(a) => run_heavy_traffic(a).map(|_| 0),
        Command::Verify(a) => run_verify(a),
    }
}

pub fn load_dist(arg: &str) -> Result<DistributionSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| invalid(format!("cannot read {arg}: {e}")))?
    };
    let spec: DistributionSpec =
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad distribution JSON: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn emit(output: &Option<PathBuf>, body: &[u8]) -> io::Result<()> {
    match output {
        Some(p) => fs::write(p, body),
        None => io::stdout().lock().write_all(body),
    }
}

fn tau_bound(spec: &DistributionSpec, z: Option<f64>, t: f64, a: &TauArgs) -> Result<f64> {
    if let Some(tau) = a.tau_mean {
        if !(tau > 0.0) {
            return Err(invalid("--tau-mean must be positive"));
        }
        return Ok(tau);
    }
    let z = z.ok_or_else(|| invalid("--z is required unless --tau-mean is given"))?;
    let method = match a.tau_method {
        TauMethod::Lorden => OvershootMethod::Lorden,
        TauMethod::Mogulskii => OvershootMethod::Mogulskii {
            a_const: a.mogulskii_a,
        },
        TauMethod::Prop1 => OvershootMethod::Prop1 {
            t: a.prop1_t.unwrap_or(t),
        },
    };
    tau_mean_ub(spec, z, method)
}

fn need(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| invalid(format!("{flag} is required for this bound")))
}

/// Evaluates one bound at explicit parameters.
#[allow(clippy::too_many_arguments)]
fn evaluate(
    spec: &DistributionSpec,
    theorem: Theorem,
    x: f64,
    y: Option<f64>,
    z: Option<f64>,
    theta: Option<f64>,
    alpha: Option<f64>,
    t: f64,
    h: Option<f64>,
    truncated: bool,
    tau: f64,
) -> Result<Option<BoundResult>> {
    let cycle = |y: f64| {
        let mut inp = BoundInputs::cycle(x, y, t, tau).truncated(truncated);
        if let Some(al) = alpha {
            inp = inp.with_alpha(al);
        }
        inp
    };
    let global = |z: f64, theta: f64| {
        let mut inp = BoundInputs::global(x, z, theta, t, tau).truncated(truncated);
        if let Some(al) = alpha {
            inp = inp.with_alpha(al);
        }
        inp
    };
    Ok(Some(match theorem {
        Theorem::Lemma1 => {
            let y = need(y, "--y")?;
            let h = match h {
                Some(h) => h,
                None => {
                    let prof = spec.moment_profile(t)?;
                    rate_t1(Moments::Full(&prof), y)?.h
                }
            };
            lemma1_bound(spec, h, x, y, tau)?
        }
        Theorem::T1 => bound_mtau_t1(spec, &cycle(need(y, "--y")?))?,
        Theorem::T2 => {
            let inp = cycle(need(y, "--y")?);
            if alpha.is_some() {
                bound_mtau_t2(spec, &inp)?
            } else {
                bound_mtau_t2_best_alpha(spec, &inp)?
            }
        }
        Theorem::T3 => {
            let inp = global(need(z, "--z")?, need(theta, "--theta")?);
            if alpha.is_some() {
                bound_max_t3(spec, &inp)?
            } else {
                bound_max_t3_best_alpha(spec, &inp)?
            }
        }
        Theorem::Series => {
            bound_max_series(spec, &global(need(z, "--z")?, need(theta, "--theta")?))?
        }
        Theorem::Cramer => return cramer_lundberg(spec, x),
    }))
}

fn bound_csv(b: &BoundResult) -> String {
    let mut s = String::from("value,value_clamped,regime,valid\n");
    s.push_str(&format!(
        "{},{},{},{}\n",
        fmt_float(b.value),
        fmt_float(b.value_clamped),
        b.regime,
        b.is_valid()
    ));
    s
}

fn run_bound(a: &BoundArgs) -> CliResult<()> {
    let spec = load_dist(&a.common.dist)?;
    let tau = if a.theorem == Theorem::Cramer {
        f64::NAN
    } else {
        tau_bound(&spec, a.z, a.t, &a.tau)?
    };
    let res = evaluate(
        &spec,
        a.theorem,
        a.x,
        a.y,
        a.z,
        a.theta,
        a.alpha,
        a.t,
        a.h,
        a.truncated,
        tau,
    )?;
    let body = match (res, a.common.format) {
        (Some(b), Format::Json) => serde_json::to_string_pretty(&b).expect("serializable") + "\n",
        (Some(b), Format::Csv) => bound_csv(&b),
        (None, Format::Json) => "{\"not_applicable\":true}\n".to_string(),
        (None, Format::Csv) => {
            "value,value_clamped,regime,valid\n,,not_applicable,false\n".to_string()
        }
    };
    emit(&a.common.output, body.as_bytes())?;
    Ok(())
}

fn run_simulate(a: &SimulateArgs) -> CliResult<()> {
    let spec = load_dist(&a.common.dist)?;
    let ests = match a.target {
        Target::M => {
            let x = need(a.x, "--x")?;
            let margin = match a.stop_margin {
                Some(m) => m,
                None => default_stop_margin(&spec)?,
            };
            vec![("m_tail", estimate_m_tail(&spec, x, a.n, a.seed, margin)?)]
        }
        Target::Mtau => {
            let (x, z) = (need(a.x, "--x")?, need(a.z, "--z")?);
            vec![("mtau_tail", estimate_mtau_tail(&spec, z, x, a.n, a.seed)?)]
        }
        Target::Tau => {
            let r = estimate_tau_overshoot(&spec, need(a.z, "--z")?, a.n, a.seed)?;
            vec![("tau", r.tau), ("overshoot", r.overshoot)]
        }
    };
    let body = match a.common.format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = ests
                .iter()
                .map(|(k, e)| {
                    (
                        k.to_string(),
                        serde_json::to_value(e).expect("serializable"),
                    )
                })
                .collect();
            serde_json::to_string_pretty(&map).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("quantity,p_hat,stderr,n,seed,ci95_lo,ci95_hi\n");
            for (k, e) in &ests {
                s.push_str(&format!(
                    "{k},{},{},{},{},{},{}\n",
                    fmt_float(e.p_hat),
                    fmt_float(e.stderr),
                    e.n,
                    e.seed,
                    fmt_float(e.ci95[0]),
                    fmt_float(e.ci95[1])
                ));
            }
            s
        }
    };
    emit(&a.common.output, body.as_bytes())?;
    Ok(())
}

/// Parses `a,b,c` or `lo:hi:n` (linear, or geometric with `log`).
pub fn parse_grid(s: &str, log: bool) -> Result<Vec<f64>> {
    let bad = || invalid(format!("bad grid '{s}'"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !(hi >= lo) || (log && !(lo > 0.0)) {
            return Err(bad());
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        Ok((0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if log {
                    lo * (hi / lo).powf(f)
                } else {
                    lo + f * (hi - lo)
                }
            })
            .collect())
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

struct SweepBest {
    value: f64,
    y: f64,
    theta: f64,
    z: f64,
    alpha: f64,
}

fn run_sweep(a: &SweepArgs) -> CliResult<()> {
    let spec = load_dist(&a.common.dist)?;
    let xs = parse_grid(&a.x_grid, a.log_grid)?;
    let yfs = parse_grid(&a.y_frac_grid, false)?;
    let thetas = parse_grid(&a.theta_grid, false)?;
    let zs = parse_grid(&a.z_grid, false)?;
    let alphas = parse_grid(&a.alpha_grid, false)?;
    let cycle = matches!(a.theorem, Theorem::Lemma1 | Theorem::T1 | Theorem::T2);
    let mut taus = Vec::with_capacity(zs.len());
    for &z in &zs {
        taus.push(tau_bound(&spec, Some(z), a.t, &a.tau)?);
    }
    let mut out = String::from("x,best_value,y,theta,z,alpha,n_valid,n_invalid\n");
    let mut json_rows = Vec::new();
    for &x in &xs {
        let (mut best, mut n_valid, mut n_invalid): (Option<SweepBest>, usize, usize) =
            (None, 0, 0);
        for (&z, &tau) in zs.iter().zip(&taus) {
            for &alpha in &alphas {
                let params: Vec<(f64, f64)> = if cycle {
                    yfs.iter().map(|f| (f * x, f64::NAN)).collect()
                } else {
                    thetas.iter().map(|&th| (f64::NAN, th)).collect()
                };
                for (y, theta) in params {
                    let r = evaluate(
                        &spec,
                        a.theorem,
                        x,
                        (!y.is_nan()).then_some(y),
                        Some(z),
                        (!theta.is_nan()).then_some(theta),
                        Some(alpha),
                        a.t,
                        None,
                        a.truncated,
                        tau,
                    );
                    match r {
                        Ok(Some(b)) if b.is_valid() => {
                            n_valid += 1;
                            if best.as_ref().is_none_or(|cur| b.value < cur.value) {
                                best = Some(SweepBest {
                                    value: b.value,
                                    y,
                                    theta,
                                    z,
                                    alpha,
                                });
                            }
                        }
                        Ok(_) => n_invalid += 1,
                        Err(e) if e.is_validation() => n_invalid += 1,
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        let cell = |v: Option<f64>| v.filter(|v| !v.is_nan()).map(fmt_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{n_valid},{n_invalid}\n",
            fmt_float(x),
            cell(best.as_ref().map(|b| b.value)),
            cell(best.as_ref().map(|b| b.y)),
            cell(best.as_ref().map(|b| b.theta)),
            cell(best.as_ref().map(|b| b.z)),
            cell(best.as_ref().map(|b| b.alpha)),
        ));
        json_rows.push(serde_json::json!({
            "x": x,
            "best_value": best.as_ref().map(|b| b.value),
            "y": best.as_ref().map(|b| b.y).filter(|v| !v.is_nan()),
            "theta": best.as_ref().map(|b| b.theta).filter(|v| !v.is_nan()),
            "z": best.as_ref().map(|b| b.z),
            "alpha": best.as_ref().map(|b| b.alpha),
            "n_valid": n_valid,
            "n_invalid": n_invalid,
        }));
    }
    let body = match a.common.format {
        Format::Csv => out,
        Format::Json => serde_json::to_string_pretty(&json_rows).expect("serializable") + "\n",
    };
    emit(&a.common.output, body.as_bytes())?;
    Ok(())
}

pub fn parse_schedule(s: &str) -> Result<Schedule> {
    let bad = || invalid(format!("bad schedule '{s}'; use log:c or power:c:kappa"));
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| {
        parts
            .get(i)
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())
    };
    match parts.first().copied() {
        Some("log") if parts.len() == 2 => Ok(Schedule::LogScaled { c: num(1)? }),
        Some("power") if parts.len() == 3 => Ok(Schedule::Power {
            c: num(1)?,
            kappa: num(2)?,
        }),
        _ => Err(bad()),
    }
}

fn run_heavy_traffic(a: &HeavyTrafficArgs) -> CliResult<()> {
    let fam = HeavyTrafficFamily::centered_pareto(
        a.r,
        a.scale,
        parse_grid(&a.drifts, false)?,
        parse_schedule(&a.schedule)?,
    )?;
    let cfg = ExperimentConfig {
        z_rule: ZRule::SqrtScaled { c: a.z_const },
        theta: a.theta,
        t: a.t,
        n_mc: a.n,
        seed: a.seed,
    };
    let rows = heavytraffic::ht_ratio_experiment(&fam, &cfg)?;
    let body = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            heavytraffic::write_csv(&rows, &mut buf)?;
            buf
        }
        Format::Json => {
            (serde_json::to_string_pretty(&rows).expect("serializable") + "\n").into_bytes()
        }
    };
    emit(&a.output, &body)?;
    Ok(())
}

fn run_verify(a: &VerifyArgs) -> CliResult<i32> {
    let suite = match a.suite {
        SuiteArg::Domination => Suite::Domination,
        SuiteArg::Montecarlo => Suite::MonteCarlo,
        SuiteArg::Wald => Suite::Wald,
        SuiteArg::All => Suite::All,
    };
    let rows = verify::run_suite(
        suite,
        &VerifyOptions {
            seed: a.seed,
            n_mc: a.n,
        },
    )?;
    let mut buf = Vec::new();
    verify::write_csv(&rows, &mut buf)?;
    emit(&a.output, &buf)?;
    let failed = rows.iter().filter(|r| !r.passed).count();
    eprintln!(
        "{} checks, {} failed: {}",
        rows.len(),
        failed,
        if failed == 0 { "PASS" } else { "FAIL" }
    );
    Ok(if failed == 0 { 0 } else { 2 })
}
