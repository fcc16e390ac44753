//! `suval`: Kähler angles, Θ-invariants, invariant valuations on polytopes,
//! form-identity verification and kinematic Monte Carlo checks from the
//! command line.
//!
//! Exit codes: 0 on pass, 1 on check failure, 2 on usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use suval_core::forms;
use suval_core::grassmann::{self, Subspace, SubspaceJson};
use suval_core::kinematics::estimators::TSampling;
use suval_core::kinematics::{
    additive_kinematic_delta, kinematic_correction_reference, principal_kinematic_delta,
    reproducing_check, MCEstimate, ReproOptions,
};
use suval_core::polytope::{Polytope, PolytopeJson};
use suval_core::selftest::{self, CheckRecord};
use suval_core::valuations::{self, evaluate, product_middle, Valuation};

#[derive(Parser)]
#[command(
    name = "suval",
    version,
    about = "Invariant valuations on ℂⁿ: orbit invariants, form identities, polytope valuations and kinematic checks"
)]
struct Cli {
    /// Worker thread cap (default: all cores; SUVAL_WORKERS as fallback).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write a machine-readable JSON report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Kähler angles of a middle-dimensional subspace.
    Kahler {
        /// Subspace JSON: {"n": int, "basis": [[[re,im], …] × k]}.
        #[arg(long)]
        subspace: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Θ-invariant of a middle-dimensional subspace.
    Theta {
        #[arg(long)]
        subspace: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Do two subspaces lie on the same SU(n)-orbit?
    OrbitEq {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate a valuation on a polytope.
    Evaluate {
        /// One of: euler, vol, one_<k>, phi1, phi1_bar, phi2, phi2_bar.
        #[arg(long)]
        valuation: String,
        /// Polytope JSON: vertices, halfspaces, or a parallelotope.
        #[arg(long)]
        polytope: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Alesker product of two middle-degree valuations (coefficient of vol).
    Product {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Numerical verification batteries.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Kinematic-formula Monte Carlo checks.
    #[command(subcommand)]
    Kinematic(KinematicCommand),
    /// dim Val^{SU(n)}.
    Dims {
        #[arg(long)]
        n: usize,
    },
    /// Run the full acceptance battery (always covers n = 2 and n = 3).
    Selftest {
        /// Accepted for interface symmetry; the battery spans n = 2 and 3.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Shrink the heavy Monte Carlo budgets (smoke run, not acceptance).
        #[arg(long)]
        fast: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Invariant-form identities, normalizations and Rumin data at one n.
    Forms {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct KinematicArgs {
    /// Polytope JSON for the first body.
    #[arg(long = "K")]
    k: PathBuf,
    /// Polytope JSON for the second body.
    #[arg(long = "L")]
    l: PathBuf,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Subcommand)]
enum KinematicCommand {
    /// SU-minus-U average of vol(K + gL) against the correction term.
    Additive(KinematicArgs),
    /// SU-minus-U average of vol(K + (−gL)).
    Principal(KinematicArgs),
    /// ∫∫ μ(K ∩ (gL+t)) dt dg against μ(K)vol(L) + vol(K)μ(L).
    Reproduce {
        #[command(flatten)]
        args: KinematicArgs,
        #[arg(long, default_value = "phi2")]
        valuation: String,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    CheckFailed,
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("invalid JSON: {e}"))
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    command: String,
    seed: Option<u64>,
    samples: Option<usize>,
    checks: Vec<CheckRecord>,
    overall_pass: bool,
    timing_ms: u128,
}

fn write_report(path: &Path, report: &Report) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(path, text)?;
    Ok(())
}

fn load_subspace(path: &Path) -> Result<Subspace, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let json: SubspaceJson = serde_json::from_str(&text)?;
    Subspace::from_json(&json).map_err(input_err)
}

fn load_polytope(path: &Path) -> Result<Polytope, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let json: PolytopeJson = serde_json::from_str(&text)?;
    Polytope::from_json(&json).map_err(input_err)
}

fn mc_record(name: &str, est: &MCEstimate) -> CheckRecord {
    CheckRecord::monte_carlo(name, est, None)
}

/// Single-value report for the plain query commands.
fn write_value_report(
    out: &OutputArgs,
    command: &str,
    value: Complex64,
    start: std::time::Instant,
) -> Result<(), CliError> {
    if let Some(path) = &out.json {
        let record = CheckRecord::reference(command.to_string(), value, value, f64::INFINITY);
        write_report(
            path,
            &Report {
                schema_version: 1,
                command: command.into(),
                seed: None,
                samples: None,
                checks: vec![record],
                overall_pass: true,
                timing_ms: start.elapsed().as_millis(),
            },
        )?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    match cli.command {
        Command::Kahler { subspace, out } => {
            let w = load_subspace(&subspace)?;
            let angles = grassmann::kaehler_angles(&w).map_err(input_err)?;
            println!("{}", json!({ "angles": angles.as_slice() }));
            if let Some(path) = out.json {
                let records = vec![CheckRecord::exact("kahler_angles_computed", 0.0, 1.0)];
                write_report(
                    &path,
                    &Report {
                        schema_version: 1,
                        command: "kahler".into(),
                        seed: None,
                        samples: None,
                        checks: records,
                        overall_pass: true,
                        timing_ms: start.elapsed().as_millis(),
                    },
                )?;
            }
            Ok(())
        }
        Command::Theta { subspace, out } => {
            let w = load_subspace(&subspace)?;
            let theta = grassmann::theta_invariant(&w).map_err(input_err)?;
            println!(
                "{}",
                json!({ "value": [theta.value.re, theta.value.im], "mod_sign": theta.mod_sign })
            );
            write_value_report(&out, "theta", theta.value, start)
        }
        Command::OrbitEq { a, b, tol, out } => {
            let wa = load_subspace(&a)?;
            let wb = load_subspace(&b)?;
            let same = grassmann::same_su_orbit(&wa, &wb, tol).map_err(input_err)?;
            println!("{}", json!({ "same_orbit": same, "tol": tol }));
            write_value_report(
                &out,
                "orbit-eq",
                Complex64::from(if same { 1.0 } else { 0.0 }),
                start,
            )
        }
        Command::Evaluate {
            valuation,
            polytope,
            out,
        } => {
            let val = Valuation::named(&valuation).map_err(input_err)?;
            let p = load_polytope(&polytope)?;
            let v = evaluate(&val, &p).map_err(input_err)?;
            println!("{}", json!({ "value_re": v.re, "value_im": v.im }));
            write_value_report(&out, "evaluate", v, start)
        }
        Command::Product { a, b, n, out } => {
            let ka = Valuation::named(&a).map_err(input_err)?.kind;
            let kb = Valuation::named(&b).map_err(input_err)?.kind;
            let v = product_middle(ka, kb, n).map_err(input_err)?;
            println!("{}", json!({ "value_re": v.re, "value_im": v.im }));
            write_value_report(&out, "product", v, start)
        }
        Command::Verify(VerifyCommand::Forms {
            n,
            samples,
            tol,
            seed,
            out,
        }) => {
            let report = forms::verify_forms(n, samples, tol, seed).map_err(input_err)?;
            for c in &report.checks {
                println!(
                    "{:<44} max_residual = {:.3e}  {}",
                    c.name,
                    c.max_residual,
                    if c.pass { "ok" } else { "FAIL" }
                );
            }
            println!(
                "forms identities at n = {n}: {}",
                if report.overall_pass { "pass" } else { "FAIL" }
            );
            if let Some(path) = out.json {
                let checks = report
                    .checks
                    .iter()
                    .map(|c| CheckRecord::exact(c.name.clone(), c.max_residual, c.tol))
                    .collect();
                write_report(
                    &path,
                    &Report {
                        schema_version: 1,
                        command: format!("verify forms --n {n}"),
                        seed: Some(seed),
                        samples: Some(samples),
                        checks,
                        overall_pass: report.overall_pass,
                        timing_ms: start.elapsed().as_millis(),
                    },
                )?;
            }
            if report.overall_pass {
                Ok(())
            } else {
                Err(CliError::CheckFailed)
            }
        }
        Command::Kinematic(cmd) => run_kinematic(cmd, start),
        Command::Dims { n } => {
            if n < 2 {
                return Err(CliError::Input("dims requires n ≥ 2".into()));
            }
            println!("{}", valuations::dimension_su(n));
            Ok(())
        }
        Command::Selftest { n, seed, fast, out } => {
            if let Some(n) = n {
                if !(2..=3).contains(&n) {
                    return Err(CliError::Input(format!(
                        "selftest covers n in 2..=3; got --n {n}"
                    )));
                }
            }
            let report = selftest::run_all(seed, fast);
            for c in &report.criteria {
                for r in &c.records {
                    println!(
                        "  {:02} :: {:<44} -> {}",
                        c.id,
                        r.name,
                        if r.pass { "ok" } else { "FAIL" }
                    );
                }
                println!(
                    "criterion {:02} ({}): {}",
                    c.id,
                    c.title,
                    if c.pass { "pass" } else { "FAIL" }
                );
            }
            println!(
                "selftest: {}",
                if report.overall_pass { "pass" } else { "FAIL" }
            );
            if let Some(path) = out.json {
                let checks = report
                    .criteria
                    .iter()
                    .flat_map(|c| c.records.iter().cloned())
                    .collect();
                write_report(
                    &path,
                    &Report {
                        schema_version: 1,
                        command: format!(
                            "selftest{}{}",
                            n.map(|v| format!(" --n {v}")).unwrap_or_default(),
                            if fast { " --fast" } else { "" }
                        ),
                        seed: Some(seed),
                        samples: None,
                        checks,
                        overall_pass: report.overall_pass,
                        timing_ms: start.elapsed().as_millis(),
                    },
                )?;
            }
            if report.overall_pass {
                Ok(())
            } else {
                Err(CliError::CheckFailed)
            }
        }
    }
}

fn delta_estimate(
    args: &KinematicArgs,
    principal: bool,
) -> Result<MCEstimate, CliError> {
    let k = load_polytope(&args.k)?;
    let l = load_polytope(&args.l)?;
    if k.dim() != 2 * args.n || l.dim() != 2 * args.n {
        return Err(CliError::Input(format!(
            "--n {} does not match the ambient dimension of the bodies",
            args.n
        )));
    }
    let (kz, lz) = match (k.as_zonotope(), l.as_zonotope()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(CliError::Input(
                "additive/principal deltas need parallelotope bodies".into(),
            ))
        }
    };
    let mut est = if principal {
        principal_kinematic_delta(&kz, &lz, args.n, args.samples, args.seed)
    } else {
        additive_kinematic_delta(&kz, &lz, args.n, args.samples, args.seed)
    };
    if args.n == 2 {
        let reference = kinematic_correction_reference(&k, &l).map_err(input_err)?;
        est = est.with_reference(reference);
    }
    Ok(est)
}

fn run_kinematic(cmd: KinematicCommand, start: std::time::Instant) -> Result<(), CliError> {
    let (args, est, name) = match cmd {
        KinematicCommand::Additive(args) => {
            let est = delta_estimate(&args, false)?;
            (args, est, "additive_delta")
        }
        KinematicCommand::Principal(args) => {
            let est = delta_estimate(&args, true)?;
            (args, est, "principal_delta")
        }
        KinematicCommand::Reproduce { args, valuation } => {
            let k = load_polytope(&args.k)?;
            let l = load_polytope(&args.l)?;
            let mu = Valuation::named(&valuation).map_err(input_err)?;
            // samples = n_g · n_t with a 100-block layout.
            let n_g = 100usize;
            let n_t = (args.samples / n_g).max(1);
            let opts = ReproOptions {
                n_g,
                n_t,
                seed: args.seed,
                sampling: TSampling::StratifiedHull,
                ..ReproOptions::default()
            };
            let mut est = reproducing_check(&mu, &k, &l, &opts).map_err(input_err)?;
            let mu_k = evaluate(&mu, &k).map_err(input_err)?;
            let mu_l = evaluate(&mu, &l).map_err(input_err)?;
            let vol_k = Complex64::from(k.volume().map_err(input_err)?);
            let vol_l = Complex64::from(l.volume().map_err(input_err)?);
            est = est.with_reference(mu_k * vol_l + vol_k * mu_l);
            (args, est, "reproducing_integral")
        }
    };
    println!(
        "{}",
        json!({
            "estimate": [est.mean.re, est.mean.im],
            "stderr": est.stderr,
            "reference": est.reference.map(|r| [r.re, r.im]),
            "z_score": est.z_score,
            "n_samples": est.n_samples,
            "pass": est.pass_3sigma(),
        })
    );
    let pass = est.pass_3sigma().unwrap_or(true);
    if let Some(path) = &args.out.json {
        let record = mc_record(name, &est);
        write_report(
            path,
            &Report {
                schema_version: 1,
                command: format!("kinematic {name}"),
                seed: Some(args.seed),
                samples: Some(args.samples),
                checks: vec![record],
                overall_pass: pass,
                timing_ms: start.elapsed().as_millis(),
            },
        )?;
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("SUVAL_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .filter(|&w| w > 0);
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed) => ExitCode::from(1),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
