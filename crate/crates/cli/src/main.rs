//! `hjj`: command-line front end for junction Hamilton-Jacobi experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hj_junction::harness::invariants::check_invariants;
use hj_junction::harness::study::{to_sorted_json, time_step};
use hj_junction::harness::{convergence_study, solve, trajectory_csv, Problem, ProblemConfig};
use hj_junction::scheme::compute_cfl;
use hj_junction::vertex::VertexTestFunction;
use hj_junction::Error;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "hjj", version, about = "Finite-difference Hamilton-Jacobi solver on junctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one trajectory and write it as CSV.
    Solve(Common),
    /// Print the gradient bounds and the largest stable time step as JSON.
    Cfl(Common),
    /// Run a convergence study over `grid.dx_list` and write it as CSV.
    Converge(Common),
    /// Sample the vertex test function described by the `[vertex]` section.
    CertifyVertex(Common),
    /// Run the monitors, monotonicity probes and comparison pairs.
    CheckInvariants(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Problem description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 1 when a check fails.
    #[arg(long)]
    strict: bool,
    /// Worker threads for parallel sections.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for sampling-based validators.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Config(String),
    Runtime(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(c: &Common) -> Result<Problem, Failure> {
    let cfg = ProblemConfig::from_path(&c.config)?;
    Ok(Problem::from_config(cfg)?)
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_solve(c: &Common) -> Result<(), Failure> {
    let p = load(c)?;
    let dx = p.config().primary_dx()?;
    let traj = solve(&p, dx)?;
    emit(c.out.as_deref(), &trajectory_csv(&traj))?;
    let v = traj.monitors.total_violations();
    if c.strict && v > 0 {
        return Err(Failure::Violation(format!("{v} monitor violations")));
    }
    Ok(())
}

fn cmd_cfl(c: &Common) -> Result<(), Failure> {
    let p = load(c)?;
    let dx = p.config().primary_dx()?;
    let grid = p.grid(dx, p.truncation_length(dx))?;
    let (scheme, u0) = p.scheme(&grid)?;
    let cfl = compute_cfl(&scheme, &u0)?;
    let dt = time_step(&p, &cfl, dx);
    let finite = |x: f64| if x.is_finite() { json!(x) } else { json!(x.to_string()) };
    let value = json!({
        "dx": dx,
        "i_max": grid.i_max(),
        "dt_max": finite(cfl.dt_max),
        "dt": dt,
        "cfl_safety": p.cfl_safety(),
        "hamiltonian_speed": cfl.hamiltonian_speed,
        "junction_speed": cfl.junction_speed,
        "bounds": {
            "lower": cfl.bounds.lower,
            "upper": cfl.bounds.upper,
            "lower_origin": cfl.bounds.lower_origin,
            "m0": cfl.bounds.m0,
        },
        "stability_constant": p.stability_constant(),
    });
    emit(c.out.as_deref(), &json_text(&value))
}

fn cmd_converge(c: &Common) -> Result<(), Failure> {
    let p = load(c)?;
    let dx = p.config().dx_list()?;
    let study = convergence_study(&p, &dx, p.config().experiment.oracle)?;
    for r in &study.rows {
        eprintln!("dx {:e}: {} steps in {:.3}s", r.dx, r.steps, r.runtime);
    }
    emit(c.out.as_deref(), &study.to_csv())?;
    let summary = json!({
        "oracle": study.oracle,
        "fitted_order": study.fitted_order_label(),
        "exact": study.exact,
        "ratio_spread": if study.ratio_spread.is_finite() { json!(study.ratio_spread) } else { json!(null) },
        "strictly_decreasing": study.strictly_decreasing(),
    });
    let text = json_text(&summary);
    if c.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    let v: usize = study.rows.iter().map(|r| r.monitors.total_violations()).sum();
    if c.strict && v > 0 {
        return Err(Failure::Violation(format!("{v} monitor violations")));
    }
    Ok(())
}

fn cmd_certify(c: &Common) -> Result<(), Failure> {
    let p = load(c)?;
    let vc = p
        .config()
        .vertex
        .clone()
        .ok_or_else(|| Failure::Config("configuration error: a [vertex] section is required".into()))?;
    let limiter = match &vc.limiter {
        None => p
            .limiter()
            .ok_or_else(|| Failure::Config("configuration error: vertex.A is required for this junction function".into()))?,
        Some(hj_junction::harness::config::LimiterValue::Number(a)) => *a,
        Some(hj_junction::harness::config::LimiterValue::Named(s)) if s.eq_ignore_ascii_case("a0") => {
            hj_junction::conditions::compute_a0(p.hamiltonians())
        }
        Some(other) => return Err(Failure::Config(format!("configuration error: invalid vertex.A {other:?}"))),
    };
    let g = VertexTestFunction::new(p.hamiltonians(), limiter, vc.gamma, vc.radius)?;
    let cert = g.certify(vc.samples, c.seed)?;
    emit(c.out.as_deref(), &to_sorted_json(&cert)?)?;
    if c.strict && !cert.passed() {
        return Err(Failure::Violation("vertex certificate failed".into()));
    }
    Ok(())
}

fn cmd_invariants(c: &Common) -> Result<(), Failure> {
    let p = load(c)?;
    let dx = p.config().primary_dx()?;
    let report = check_invariants(&p, dx, c.seed, 1000, 20, 200)?;
    emit(c.out.as_deref(), &to_sorted_json(&report)?)?;
    if c.strict && !report.passed() {
        return Err(Failure::Violation(format!("{} invariant violations", report.violations())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Solve(c) | Command::Cfl(c) | Command::Converge(c) | Command::CertifyVertex(c) | Command::CheckInvariants(c) => c,
    };
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("hjj: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Solve(c) => cmd_solve(c),
        Command::Cfl(c) => cmd_cfl(c),
        Command::Converge(c) => cmd_converge(c),
        Command::CertifyVertex(c) => cmd_certify(c),
        Command::CheckInvariants(c) => cmd_invariants(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("hjj: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) | Err(Failure::Violation(msg)) => {
            eprintln!("hjj: {msg}");
            ExitCode::from(1)
        }
    }
}
