//! Randomized checks of monotonicity, comparison and the runtime monitors.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::junction::{Grid, GridField};
use crate::scheme::{discrete_comparison_check, Scheme};

use super::problem::Problem;
use super::study::{solve_on, MonitorSummary};

/// A field whose forward gradients are independent and uniform in `[-l, l]`.
pub fn random_lipschitz_field(grid: &Grid, l: f64, rng: &mut impl Rng) -> GridField {
    let dx = grid.dx();
    let origin = rng.gen_range(-1.0..1.0);
    let branches = (0..grid.num_branches())
        .map(|_| {
            let mut v = origin;
            (0..grid.i_max())
                .map(|_| {
                    v += rng.gen_range(-l..=l) * dx;
                    v
                })
                .collect()
        })
        .collect();
    GridField::from_parts(*grid, origin, branches).expect("shape matches the grid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub probes: usize,
    pub failures: usize,
    /// Smallest output change over all probes; non-negative for a monotone step.
    pub min_delta: f64,
}

/// Raises one random node by a small amount and checks that no node of the
/// next state decreases by more than `1e-13`.
pub fn monotonicity_probes(scheme: &Scheme, u: &GridField, dt: f64, count: usize, rng: &mut impl Rng) -> Result<ProbeSummary> {
    let grid = scheme.grid();
    let base = scheme.step(u, dt, 0)?.0;
    let mut summary = ProbeSummary {
        probes: count,
        failures: 0,
        min_delta: f64::INFINITY,
    };
    for _ in 0..count {
        let a = rng.gen_range(0..grid.num_branches());
        let i = rng.gen_range(0..=grid.i_max());
        let bump = grid.dx() * rng.gen_range(1e-4..1e-2);
        let mut v = u.clone();
        v.set(a, i, u.get(a, i) + bump);
        let next = scheme.step(&v, dt, 0)?.0;
        let delta = next.values().zip(base.values()).map(|(x, y)| x - y).fold(f64::INFINITY, f64::min);
        summary.min_delta = summary.min_delta.min(delta);
        if delta < -1e-13 {
            summary.failures += 1;
        }
    }
    Ok(summary)
}

/// `v0 = u0 + c + eps phi` with `c >= 0` and `phi` in `[0, 1]` node by node;
/// counts the pairs whose order breaks within `steps` steps.
pub fn comparison_pairs(
    scheme: &Scheme,
    u0: &GridField,
    dt: f64,
    pairs: usize,
    steps: usize,
    rng: &mut impl Rng,
) -> Result<usize> {
    let eps = 0.1 * scheme.grid().dx();
    let mut failures = 0;
    for _ in 0..pairs {
        let c = rng.gen_range(0.0..0.5);
        let mut v0 = u0.map(|x| x + c);
        let origin = v0.origin() + eps * rng.gen_range(0.0..1.0);
        v0.set_origin(origin);
        for a in 0..scheme.grid().num_branches() {
            for x in v0.branch_mut(a) {
                *x += eps * rng.gen_range(0.0..1.0);
            }
        }
        if !discrete_comparison_check(scheme, u0, &v0, dt, steps)? {
            failures += 1;
        }
    }
    Ok(failures)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub seed: u64,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    pub monitors: MonitorSummary,
    pub monotonicity: ProbeSummary,
    pub comparison_pairs: usize,
    pub comparison_failures: usize,
}

impl InvariantReport {
    pub fn violations(&self) -> usize {
        self.monitors.total_violations() + self.monotonicity.failures + self.comparison_failures
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// Runs the problem at `dx` with every monitor on, then probes monotonicity
/// and comparison on the initial state.
pub fn check_invariants(
    problem: &Problem,
    dx: f64,
    seed: u64,
    probes: usize,
    pairs: usize,
    pair_steps: usize,
) -> Result<InvariantReport> {
    let grid = problem.grid(dx, problem.truncation_length(dx))?;
    let traj = solve_on(problem, &grid)?;
    let (scheme, u0) = problem.scheme(&grid)?;
    let dt = traj.dt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monotonicity = monotonicity_probes(&scheme, &u0, dt, probes, &mut rng)?;
    let comparison_failures = comparison_pairs(&scheme, &u0, dt, pairs, pair_steps, &mut rng)?;
    Ok(InvariantReport {
        seed,
        dx,
        dt,
        steps: traj.steps,
        monitors: MonitorSummary::new(&traj.monitors, dx / dt),
        monotonicity,
        comparison_pairs: pairs,
        comparison_failures,
    })
}
