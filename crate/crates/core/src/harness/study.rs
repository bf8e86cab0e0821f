//! Single trajectories, convergence studies and their CSV/JSON renderings.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::junction::{Grid, GridField};
use crate::numerics::least_squares_slope;
use crate::scheme::{compute_cfl, run, CflResult, Monitors, RunOptions, Scheme, SchemeConfig};

use super::config::OracleChoice;
use super::oracle::{hopf_lax_oracle, reference_solution};
use super::problem::Problem;

/// Errors below this are reported as an exact fit.
pub const EXACT_THRESHOLD: f64 = 1e-10;

/// Doubles as CSV fields: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Time step `cfl_safety * dt_max`; the horizon (or `dx`) when nothing moves.
pub fn time_step(problem: &Problem, cfl: &CflResult, dx: f64) -> f64 {
    if cfl.dt_max.is_finite() {
        problem.cfl_safety() * cfl.dt_max
    } else {
        problem.horizon().max(dx)
    }
}

fn scheme_config(problem: &Problem, dx: f64, dt: f64) -> Result<SchemeConfig> {
    let mut c = SchemeConfig::new(dx, dt, problem.horizon())?;
    c.cfl_safety = problem.cfl_safety();
    c.boundary_closure = problem.closure();
    Ok(c)
}

/// Summary of [`Monitors`] without the per-step records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSummary {
    pub gradient_violations: usize,
    pub time_derivative_violations: usize,
    pub time_derivative_bound_violations: usize,
    pub cfl_violations: usize,
    pub stability_violations: usize,
    pub max_gradient_excess: f64,
    pub max_stability_excess: f64,
    pub max_conservation_residual: f64,
    pub max_cfl_margin: f64,
    pub cfl_limit: f64,
    pub m_first: f64,
    pub m_last: f64,
    pub big_m_first: f64,
    pub big_m_last: f64,
}

impl MonitorSummary {
    pub fn new(m: &Monitors, cfl_limit: f64) -> Self {
        Self {
            gradient_violations: m.gradient_violations,
            time_derivative_violations: m.time_derivative_violations,
            time_derivative_bound_violations: m.time_derivative_bound_violations,
            cfl_violations: m.cfl_violations,
            stability_violations: m.stability_violations,
            max_gradient_excess: m.max_gradient_excess,
            max_stability_excess: m.max_stability_excess,
            max_conservation_residual: m.max_conservation_residual,
            max_cfl_margin: m.cfl_margin.iter().copied().fold(0.0, f64::max),
            cfl_limit,
            m_first: m.m.first().copied().unwrap_or(f64::NAN),
            m_last: m.m.last().copied().unwrap_or(f64::NAN),
            big_m_first: m.big_m.first().copied().unwrap_or(f64::NAN),
            big_m_last: m.big_m.last().copied().unwrap_or(f64::NAN),
        }
    }

    pub fn total_violations(&self) -> usize {
        self.gradient_violations
            + self.time_derivative_violations
            + self.time_derivative_bound_violations
            + self.cfl_violations
            + self.stability_violations
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub state: GridField,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub cfl: CflResult,
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<Snapshot>,
    pub monitors: Monitors,
}

/// Runs one trajectory with every monitor enabled. Snapshots are taken every
/// `experiment.snapshot_every` steps and always at both ends.
pub fn solve(problem: &Problem, dx: f64) -> Result<Trajectory> {
    let grid = problem.grid(dx, problem.truncation_length(dx))?;
    solve_on(problem, &grid)
}

pub fn solve_on(problem: &Problem, grid: &Grid) -> Result<Trajectory> {
    let dx = grid.dx();
    let (scheme, u0) = problem.scheme(grid)?;
    let cfl = compute_cfl(&scheme, &u0)?;
    let dt = time_step(problem, &cfl, dx);
    let config = scheme_config(problem, dx, dt)?;
    let steps = config.n_t();
    let every = problem.config().experiment.snapshot_every;
    let options = RunOptions {
        bounds: Some(cfl.bounds.clone()),
        stability_constant: Some(problem.stability_constant()),
        conservation: true,
    };
    let mut snapshots = Vec::new();
    let result = run(&scheme, &u0, &config, &options, |n, t, u| {
        if n == 0 || n == steps || (every > 0 && n % every == 0) {
            snapshots.push(Snapshot {
                step: n,
                time: t,
                state: u.clone(),
            });
        }
    })?;
    Ok(Trajectory {
        scheme,
        cfl,
        dt,
        steps,
        snapshots,
        monitors: result.monitors,
    })
}

/// `t,branch,i,x,U,W,p_plus`, one row per node and snapshot. The origin is
/// listed once per branch; branches are labelled from 1.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,branch,i,x,U,W,p_plus\n");
    let grid = traj.scheme.grid();
    for snap in &traj.snapshots {
        let w = traj.scheme.time_derivative(&snap.state);
        for a in 0..grid.num_branches() {
            for i in 0..=grid.i_max() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt_f64(snap.time),
                    a + 1,
                    i,
                    fmt_f64(grid.coordinate(i)),
                    fmt_f64(snap.state.get(a, i)),
                    fmt_f64(w.get(a, i)),
                    fmt_f64(traj.scheme.p_plus(&snap.state, a, i)),
                );
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    pub sup_error: f64,
    /// Wall-clock seconds; not part of the CSV.
    pub runtime: f64,
    pub monitors: MonitorSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub oracle: OracleChoice,
    pub length: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log dx`; absent when exact.
    pub fitted_order: Option<f64>,
    pub exact: bool,
    /// `max / min` of `error / dx^(1/3)` over the rows.
    pub ratio_spread: f64,
}

impl ConvergenceStudy {
    pub fn fitted_order_label(&self) -> String {
        match (self.exact, self.fitted_order) {
            (true, _) => "exact".into(),
            (false, Some(p)) => format!("{p:.6}"),
            (false, None) => "undefined".into(),
        }
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "dx,dt,steps,sup_error,error_ratio,violations,max_conservation_residual,max_stability_excess\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt_f64(r.dx),
                fmt_f64(r.dt),
                r.steps,
                fmt_f64(r.sup_error),
                fmt_f64(r.sup_error / r.dx.cbrt()),
                r.monitors.total_violations(),
                fmt_f64(r.monitors.max_conservation_residual),
                fmt_f64(r.monitors.max_stability_excess),
            );
        }
        out
    }
}

/// Resolves `Auto`, and rejects the Hopf-Lax oracle when the problem is not
/// a glued line.
pub fn resolve_oracle(problem: &Problem, choice: OracleChoice) -> Result<OracleChoice> {
    let line = problem.line_hamiltonian().is_some();
    match choice {
        OracleChoice::Auto if line => Ok(OracleChoice::HopfLax),
        OracleChoice::Auto => Ok(OracleChoice::Reference),
        OracleChoice::HopfLax if !line => Err(Error::Config(
            "the Hopf-Lax oracle needs a glued line: two branches, line = true, mirrored convex Hamiltonians and A <= A0"
                .into(),
        )),
        c => Ok(c),
    }
}

/// Nodes `(branch, i)` of the diagnostic window; the origin appears once.
pub fn window_nodes(grid: &Grid, radius: f64) -> Vec<(usize, usize)> {
    let cut = radius.min(0.9 * grid.length()) * (1.0 + 1e-12);
    let mut nodes = vec![(0, 0)];
    for a in 0..grid.num_branches() {
        nodes.extend((1..=grid.i_max()).take_while(|&i| grid.coordinate(i) <= cut).map(|i| (a, i)));
    }
    nodes
}

fn study_row(problem: &Problem, dx: f64, length: f64, oracle: OracleChoice) -> Result<ConvergenceRow> {
    let start = Instant::now();
    let grid = problem.grid(dx, length)?;
    let (scheme, u0) = problem.scheme(&grid)?;
    let cfl = compute_cfl(&scheme, &u0)?;
    let dt = time_step(problem, &cfl, dx);
    let config = scheme_config(problem, dx, dt)?;
    let steps = config.n_t();
    let nodes = window_nodes(&grid, problem.radius());
    let reference = match oracle {
        OracleChoice::Reference => Some(reference_solution(
            problem,
            &grid,
            dt,
            steps,
            problem.config().experiment.refinement,
        )?),
        _ => None,
    };
    let line_h = problem.line_hamiltonian();
    let options = RunOptions {
        bounds: Some(cfl.bounds.clone()),
        stability_constant: Some(problem.stability_constant()),
        conservation: true,
    };
    let mut sup_error = 0.0f64;
    let mut failure: Option<Error> = None;
    let result = run(&scheme, &u0, &config, &options, |n, _, u| {
        if failure.is_some() {
            return;
        }
        let t = n as f64 * dt;
        for &(a, i) in &nodes {
            let exact = match (&reference, &line_h) {
                (Some(r), _) => r[n].get(a, i),
                (None, Some(h)) => {
                    let z = problem.line_coordinate(grid.point(a, i));
                    match hopf_lax_oracle(problem.profile(), h, t, z) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Some(e);
                            return;
                        }
                    }
                }
                (None, None) => unreachable!("oracle resolved before the run"),
            };
            sup_error = sup_error.max((u.get(a, i) - exact).abs());
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ConvergenceRow {
        dx,
        dt,
        steps,
        sup_error,
        runtime: start.elapsed().as_secs_f64(),
        monitors: MonitorSummary::new(&result.monitors, dx / dt),
    })
}

/// Runs the scheme on every `dx` (in parallel) and measures the sup error
/// over the diagnostic window and all time levels up to the horizon.
pub fn convergence_study(problem: &Problem, dx_list: &[f64], oracle: OracleChoice) -> Result<ConvergenceStudy> {
    if dx_list.len() < 3 {
        return Err(Error::Config(format!(
            "a convergence study needs at least 3 grid entries, got {}",
            dx_list.len()
        )));
    }
    if dx_list.iter().any(|d| !(*d > 0.0)) || dx_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config("dx_list must be positive and strictly decreasing".into()));
    }
    let oracle = resolve_oracle(problem, oracle)?;
    let length = problem.truncation_length(dx_list[0]);
    let rows = dx_list
        .par_iter()
        .map(|&dx| study_row(problem, dx, length, oracle))
        .collect::<Result<Vec<_>>>()?;
    let exact = rows.iter().all(|r| r.sup_error < EXACT_THRESHOLD);
    let fitted_order = if exact {
        None
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| r.dx.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.sup_error.max(f64::MIN_POSITIVE).ln()).collect();
        least_squares_slope(&xs, &ys)
    };
    let ratios: Vec<f64> = rows.iter().map(|r| r.sup_error / r.dx.cbrt()).collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let ratio_spread = if lo > 0.0 { hi / lo } else { f64::NAN };
    Ok(ConvergenceStudy {
        oracle,
        length,
        rows,
        fitted_order,
        exact,
        ratio_spread,
    })
}
