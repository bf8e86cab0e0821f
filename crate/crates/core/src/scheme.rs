//! The explicit monotone scheme on a junction, CFL selection from initial
//! data, runtime monitors for the discrete gradient and time-derivative
//! estimates, modified Hamiltonians and the conservation-law form.

use std::sync::Arc;

use serde::Serialize;

use crate::conditions::{JunctionFunction, LowerInverse};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, HamiltonianFn, Side};
use crate::junction::{Grid, GridField};
use crate::numerics::{box_sup, sampled_sup, TOL_F, TOL_X};

/// How the last node of each truncated branch sees its missing right neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryClosure {
    /// The ghost slope `p_{imax,+}` stays equal to its initial value.
    FrozenGradient,
    /// `p_{imax,+} := p_{imax,-}`, so the node sees `H(p_{imax,-})`.
    GradientExtrapolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeConfig {
    pub dx: f64,
    pub dt: f64,
    pub horizon: f64,
    pub cfl_safety: f64,
    pub boundary_closure: BoundaryClosure,
}

impl SchemeConfig {
    pub fn new(dx: f64, dt: f64, horizon: f64) -> Result<Self> {
        let cfg = Self {
            dx,
            dt,
            horizon,
            cfl_safety: 0.9,
            boundary_closure: BoundaryClosure::FrozenGradient,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::InvalidArgument(format!("dx must be positive, got {}", self.dx)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be non-negative, got {}", self.horizon)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        Ok(())
    }

    /// `n_T = floor(T / dt)`, robust to `T / dt` landing just below an integer.
    pub fn n_t(&self) -> usize {
        ((self.horizon / self.dt) * (1.0 + 1e-12)).floor() as usize
    }
}

/// `max(H^-(p_plus), H^+(p_minus))`.
#[inline]
pub fn numerical_hamiltonian(h: &Hamiltonian, p_plus: f64, p_minus: f64) -> f64 {
    h.minus(p_plus).max(h.plus(p_minus))
}

/// `A = H^+(v_b)`.
pub fn bln_flux_limiter(h: &Hamiltonian, v_b: f64) -> f64 {
    h.plus(v_b)
}

/// Hamiltonians, junction function and grid of one discretized problem.
#[derive(Debug, Clone)]
pub struct Scheme {
    grid: Grid,
    hamiltonians: Vec<Hamiltonian>,
    f: Arc<dyn JunctionFunction>,
    closure: BoundaryClosure,
    ghost_slopes: Vec<f64>,
}

impl Scheme {
    /// `initial` fixes the ghost slopes of the frozen-gradient closure.
    pub fn new(
        initial: &GridField,
        hamiltonians: Vec<Hamiltonian>,
        f: Arc<dyn JunctionFunction>,
        closure: BoundaryClosure,
    ) -> Result<Self> {
        let grid = *initial.grid();
        let n = grid.num_branches();
        if hamiltonians.len() != n || f.num_branches() != n {
            return Err(Error::InvalidArgument(format!(
                "grid has {n} branches but got {} Hamiltonians and a {}-branch junction function",
                hamiltonians.len(),
                f.num_branches()
            )));
        }
        let i_max = grid.i_max();
        let ghost_slopes = (0..n).map(|a| initial.forward_gradient(a, i_max - 1)).collect();
        Ok(Self {
            grid,
            hamiltonians,
            f,
            closure,
            ghost_slopes,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn hamiltonians(&self) -> &[Hamiltonian] {
        &self.hamiltonians
    }

    pub fn junction_function(&self) -> &Arc<dyn JunctionFunction> {
        &self.f
    }

    pub fn closure(&self) -> BoundaryClosure {
        self.closure
    }

    /// Same closure data, different Hamiltonians and junction function.
    pub fn with_functions(&self, hamiltonians: Vec<Hamiltonian>, f: Arc<dyn JunctionFunction>) -> Result<Self> {
        if hamiltonians.len() != self.hamiltonians.len() || f.num_branches() != self.hamiltonians.len() {
            return Err(Error::InvalidArgument("branch count mismatch".into()));
        }
        Ok(Self {
            hamiltonians,
            f,
            ..self.clone()
        })
    }

    /// `p_{i,+}` on `branch`, including the ghost slope at `i_max`.
    #[inline]
    pub fn p_plus(&self, u: &GridField, branch: usize, i: usize) -> f64 {
        if i < self.grid.i_max() {
            u.forward_gradient(branch, i)
        } else {
            match self.closure {
                BoundaryClosure::FrozenGradient => self.ghost_slopes[branch],
                BoundaryClosure::GradientExtrapolation => u.forward_gradient(branch, i - 1),
            }
        }
    }

    /// `(p_{0,+}^1, ..., p_{0,+}^N)`.
    pub fn origin_gradients(&self, u: &GridField) -> Vec<f64> {
        (0..self.grid.num_branches()).map(|a| u.forward_gradient(a, 0)).collect()
    }

    /// The update term at a node: `F(p_{0,+})` at the origin (`i = 0`),
    /// `max(H^+(p_{i,-}), H^-(p_{i,+}))` elsewhere.
    #[inline]
    pub fn node_flux(&self, u: &GridField, branch: usize, i: usize) -> f64 {
        if i == 0 {
            return self.f.value(&self.origin_gradients(u));
        }
        let p_minus = u.forward_gradient(branch, i - 1);
        let p_plus = self.p_plus(u, branch, i);
        numerical_hamiltonian(&self.hamiltonians[branch], p_plus, p_minus)
    }

    /// Discrete time derivative `W^n = -(update term)`, which depends on `U^n` only.
    pub fn time_derivative(&self, u: &GridField) -> GridField {
        let mut w = GridField::constant(self.grid, 0.0);
        w.set_origin(-self.node_flux(u, 0, 0));
        for a in 0..self.grid.num_branches() {
            let h = &self.hamiltonians[a];
            let i_max = self.grid.i_max();
            let out = w.branch_mut(a);
            for i in 1..=i_max {
                let p_minus = u.forward_gradient(a, i - 1);
                let p_plus = self.p_plus(u, a, i);
                out[i - 1] = -numerical_hamiltonian(h, p_plus, p_minus);
            }
        }
        w
    }

    /// One step from the frozen state `u`. Returns `U^{n+1}` and `W^n`.
    /// `step` only labels blow-up errors.
    pub fn step(&self, u: &GridField, dt: f64, step: usize) -> Result<(GridField, GridField)> {
        let w = self.time_derivative(u);
        let mut next = u.clone();
        let origin = u.origin() + dt * w.origin();
        if !origin.is_finite() {
            return Err(Error::NumericalBlowup {
                step,
                branch: 0,
                node: 0,
                value: origin,
            });
        }
        next.set_origin(origin);
        for a in 0..self.grid.num_branches() {
            let wa = w.branch(a);
            for (i, (v, dv)) in next.branch_mut(a).iter_mut().zip(wa).enumerate() {
                *v += dt * dv;
                if !v.is_finite() {
                    return Err(Error::NumericalBlowup {
                        step,
                        branch: a + 1,
                        node: i + 1,
                        value: *v,
                    });
                }
            }
        }
        Ok((next, w))
    }
}

/// Bounds of the discrete gradients implied by the initial data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower_origin: Vec<f64>,
    pub m0: f64,
}

impl GradientBounds {
    /// The box `prod [lower_origin_a, upper_a]`.
    pub fn origin_box(&self) -> Vec<(f64, f64)> {
        self.lower_origin.iter().zip(&self.upper).map(|(&l, &u)| (l, u)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CflResult {
    pub bounds: GradientBounds,
    /// `max_a sup |H_a'|` over `[lower_a, upper_a]`.
    pub hamiltonian_speed: f64,
    /// `sup (-div F)` over the origin box.
    pub junction_speed: f64,
    pub dt_max: f64,
}

/// Gradient bounds and the largest admissible time step, from one dry-run
/// evaluation of the scheme on the initial field.
pub fn compute_cfl(scheme: &Scheme, u0: &GridField) -> Result<CflResult> {
    let w = scheme.time_derivative(u0);
    let m0 = w.min();
    if !m0.is_finite() {
        return Err(Error::Data(format!("initial time derivative is unbounded (m0 = {m0})")));
    }
    let k = -m0;
    let hs = scheme.hamiltonians();
    let mut lower = Vec::with_capacity(hs.len());
    let mut upper = Vec::with_capacity(hs.len());
    for h in hs {
        let level = if k > h.min_value() + TOL_F * (1.0 + k.abs()) { k } else { k + 1.0 };
        lower.push(h.inverse(Side::Minus, level));
        upper.push(h.inverse(Side::Plus, level));
    }
    let f = scheme.junction_function();
    let first = f.lower_inverse(k, Some(&upper));
    let mut second: Option<LowerInverse> = None;
    let mut lower_origin = Vec::with_capacity(hs.len());
    for a in 0..hs.len() {
        let t = first.thresholds[a];
        if !first.feasible || (t - upper[a]).abs() <= TOL_X * (1.0 + t.abs()) {
            let s = second.get_or_insert_with(|| f.lower_inverse(k + 1.0, Some(&upper)));
            lower_origin.push(s.thresholds[a]);
        } else {
            lower_origin.push(t);
        }
    }
    if lower_origin.iter().zip(&upper).any(|(l, u)| !(l <= u)) || lower.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "inconsistent gradient bounds: lower {lower:?}, upper {upper:?}, origin {lower_origin:?}"
        )));
    }
    let bounds = GradientBounds {
        lower,
        upper,
        lower_origin,
        m0,
    };
    let hamiltonian_speed = hs
        .iter()
        .zip(bounds.lower.iter().zip(&bounds.upper))
        .map(|(h, (&lo, &hi))| h.sup_abs_deriv(lo, hi))
        .fold(0.0, f64::max);
    let junction_speed = box_sup(|p| f.neg_divergence(p), &bounds.origin_box(), 33).0.max(0.0);
    let speed = hamiltonian_speed.max(junction_speed);
    let dt_max = if speed > 0.0 {
        scheme.grid().dx() / speed
    } else {
        f64::INFINITY
    };
    Ok(CflResult {
        bounds,
        hamiltonian_speed,
        junction_speed,
        dt_max,
    })
}

/// `H~`: equal to `H` on `[lo, hi]` and affine with slopes `-C/2`, `+C/2`
/// outside, where `C = sup |H'|` on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct ModifiedHamiltonian {
    base: Hamiltonian,
    lo: f64,
    hi: f64,
    c: f64,
}

impl ModifiedHamiltonian {
    pub fn slope_bound(&self) -> f64 {
        self.c
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

impl HamiltonianFn for ModifiedHamiltonian {
    fn eval(&self, p: f64) -> f64 {
        if p < self.lo {
            self.base.eval(self.lo) - 0.5 * self.c * (p - self.lo)
        } else if p > self.hi {
            self.base.eval(self.hi) + 0.5 * self.c * (p - self.hi)
        } else {
            self.base.eval(p)
        }
    }

    fn deriv(&self, p: f64) -> f64 {
        if p < self.lo {
            -0.5 * self.c
        } else if p > self.hi {
            0.5 * self.c
        } else {
            self.base.deriv(p)
        }
    }

    fn second_deriv(&self, p: f64) -> f64 {
        if p < self.lo || p > self.hi {
            0.0
        } else {
            self.base.second_deriv(p)
        }
    }

    fn argmin_hint(&self) -> Option<f64> {
        Some(self.base.p0().clamp(self.lo, self.hi))
    }

    fn inverse(&self, side: Side, level: f64) -> Option<f64> {
        let at_lo = self.base.eval(self.lo);
        let at_hi = self.base.eval(self.hi);
        Some(match side {
            Side::Plus if level > at_hi && self.c > 0.0 => self.hi + 2.0 * (level - at_hi) / self.c,
            Side::Minus if level > at_lo && self.c > 0.0 => self.lo - 2.0 * (level - at_lo) / self.c,
            _ => self.base.inverse(side, level).clamp(self.lo, self.hi),
        })
    }
}

/// Builds `H~` on `[lo, hi]` (which must contain the argmin of `h`).
pub fn build_modified_hamiltonian(h: &Hamiltonian, lo: f64, hi: f64) -> Result<(Hamiltonian, ModifiedHamiltonian)> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid clamp interval [{lo}, {hi}]")));
    }
    if h.p0() < lo - TOL_X || h.p0() > hi + TOL_X {
        return Err(Error::InvalidArgument(format!(
            "clamp interval [{lo}, {hi}] does not contain the argmin {}",
            h.p0()
        )));
    }
    let modified = ModifiedHamiltonian {
        base: h.clone(),
        lo,
        hi,
        c: h.sup_abs_deriv(lo, hi),
    };
    let wrapped = Hamiltonian::new(modified.clone())?;
    Ok((wrapped, modified))
}

/// `max{|A|, max_a sup_{|p| <= L0} |H_a|, sup_{|p_a| <= L0} |F|}`.
pub fn stability_constant(l0: f64, hamiltonians: &[Hamiltonian], f: &dyn JunctionFunction, limiter: Option<f64>) -> f64 {
    let mut c = limiter.filter(|a| a.is_finite()).map_or(0.0, f64::abs);
    for h in hamiltonians {
        c = c.max(h.sup_abs(-l0, l0));
    }
    let box_: Vec<(f64, f64)> = vec![(-l0, l0); f.num_branches()];
    c.max(box_sup(|p| f.value(p).abs(), &box_, 33).0)
}

/// Values `V_{i+1/2}` of the discrete conservation-law solution, per branch,
/// `i = 0..imax-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField {
    pub dx: f64,
    pub values: Vec<Vec<f64>>,
}

pub fn extract_conservation_field(u: &GridField) -> StaggeredField {
    let grid = u.grid();
    let values = (0..grid.num_branches())
        .map(|a| (0..grid.i_max()).map(|i| u.forward_gradient(a, i)).collect())
        .collect();
    StaggeredField { dx: grid.dx(), values }
}

/// Largest cell residual of the flux-difference update
/// `V^{n+1} - V^n + dt/dx (flux_{i+1} - flux_i)` between two consecutive states.
pub fn conservation_residual(scheme: &Scheme, before: &GridField, after: &GridField, dt: f64) -> f64 {
    let v0 = extract_conservation_field(before);
    let v1 = extract_conservation_field(after);
    let ratio = dt / scheme.grid().dx();
    let origin_flux = scheme.node_flux(before, 0, 0);
    let mut worst = 0.0f64;
    for a in 0..scheme.grid().num_branches() {
        let mut left = origin_flux;
        for i in 0..scheme.grid().i_max() {
            let right = scheme.node_flux(before, a, i + 1);
            let r = v1.values[a][i] - v0.values[a][i] + ratio * (right - left);
            worst = worst.max(r.abs());
            left = right;
        }
    }
    worst
}

/// What [`run`] checks at every step.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Checks the discrete gradients against these bounds and evaluates the
    /// per-step CFL margin.
    pub bounds: Option<GradientBounds>,
    /// Checks `|U^n - U^0| <= C0 t_n` with this `C0`.
    pub stability_constant: Option<f64>,
    /// Records the conservation-law residual of every step.
    pub conservation: bool,
}

/// Counters and per-step records collected by [`run`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct Monitors {
    /// `m^n = min W^n` for `n = 0..=n_T`.
    pub m: Vec<f64>,
    /// `M^n = max W^n`.
    pub big_m: Vec<f64>,
    /// `max_{a,i} D_{i,+}^{a,n}` for `n = 0..n_T`.
    pub cfl_margin: Vec<f64>,
    pub gradient_violations: usize,
    pub max_gradient_excess: f64,
    pub time_derivative_violations: usize,
    pub time_derivative_bound_violations: usize,
    pub cfl_violations: usize,
    pub stability_violations: usize,
    pub max_stability_excess: f64,
    pub max_conservation_residual: f64,
}

impl Monitors {
    pub fn total_violations(&self) -> usize {
        self.gradient_violations
            + self.time_derivative_violations
            + self.time_derivative_bound_violations
            + self.cfl_violations
            + self.stability_violations
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_state: GridField,
    pub steps: usize,
    pub monitors: Monitors,
}

const GRADIENT_SLACK: f64 = 1e-10;
const MONOTONE_SLACK: f64 = 1e-12;

/// Runs `n_T` steps from `u0`, calling `observe(n, t_n, U^n)` for
/// `n = 0..=n_T`. Monitor violations are counted, not fatal.
pub fn run(
    scheme: &Scheme,
    u0: &GridField,
    config: &SchemeConfig,
    options: &RunOptions,
    mut observe: impl FnMut(usize, f64, &GridField),
) -> Result<RunResult> {
    config.validate()?;
    let n_t = config.n_t();
    let dt = config.dt;
    let dx = scheme.grid().dx();
    let mut mon = Monitors::default();
    let mut u = u0.clone();
    observe(0, 0.0, &u);
    let mut w_prev: Option<GridField> = None;
    for n in 0..n_t {
        let (next, w) = scheme.step(&u, dt, n)?;
        record_time_derivative(&mut mon, &w, w_prev.as_ref());
        if let Some(b) = &options.bounds {
            check_gradients(scheme, &u, b, &mut mon);
            check_prop33(scheme, &u, w.min(), b, &mut mon);
            let d = cfl_margin(scheme, &u, &next);
            if d > dx / dt * (1.0 + 1e-12) {
                mon.cfl_violations += 1;
            }
            mon.cfl_margin.push(d);
        }
        if options.conservation {
            let r = conservation_residual(scheme, &u, &next, dt);
            mon.max_conservation_residual = mon.max_conservation_residual.max(r);
        }
        let t = (n + 1) as f64 * dt;
        if let Some(c0) = options.stability_constant {
            let excess = next.sup_distance(u0) - c0 * t;
            if excess > 1e-12 {
                mon.stability_violations += 1;
            }
            mon.max_stability_excess = mon.max_stability_excess.max(excess);
        }
        w_prev = Some(w);
        u = next;
        observe(n + 1, t, &u);
    }
    let w = scheme.time_derivative(&u);
    record_time_derivative(&mut mon, &w, w_prev.as_ref());
    if let Some(b) = &options.bounds {
        check_gradients(scheme, &u, b, &mut mon);
    }
    Ok(RunResult {
        final_state: u,
        steps: n_t,
        monitors: mon,
    })
}

fn record_time_derivative(mon: &mut Monitors, w: &GridField, prev: Option<&GridField>) {
    let (m, big_m) = (w.min(), w.max());
    if prev.is_some() {
        let (pm, pbig) = (*mon.m.last().unwrap(), *mon.big_m.last().unwrap());
        if m < pm - MONOTONE_SLACK || big_m > pbig + MONOTONE_SLACK || m > big_m {
            mon.time_derivative_violations += 1;
        }
    }
    mon.m.push(m);
    mon.big_m.push(big_m);
}

fn outside(p: f64, lo: f64, hi: f64) -> f64 {
    (lo - p).max(p - hi).max(0.0)
}

fn check_gradients(scheme: &Scheme, u: &GridField, b: &GradientBounds, mon: &mut Monitors) {
    let i_max = scheme.grid().i_max();
    let mut bad = 0;
    for a in 0..scheme.grid().num_branches() {
        let p0 = u.forward_gradient(a, 0);
        let e = outside(p0, b.lower_origin[a], b.upper[a]);
        mon.max_gradient_excess = mon.max_gradient_excess.max(e);
        if e > GRADIENT_SLACK * (1.0 + p0.abs()) {
            bad += 1;
        }
        for i in 1..i_max {
            let p = u.forward_gradient(a, i);
            let e = outside(p, b.lower[a], b.upper[a]);
            mon.max_gradient_excess = mon.max_gradient_excess.max(e);
            if e > GRADIENT_SLACK * (1.0 + p.abs()) {
                bad += 1;
            }
        }
    }
    mon.gradient_violations += bad;
}

/// With `K = min W^n`: `pi^-(-K) <= p_{i,+} <= pi^+(-K)` at interior nodes and
/// `p(-K) <= p_{0,+}` at the origin.
fn check_prop33(scheme: &Scheme, u: &GridField, k: f64, b: &GradientBounds, mon: &mut Monitors) {
    let i_max = scheme.grid().i_max();
    let level = -k;
    let origin = scheme.junction_function().lower_inverse(level, Some(&b.upper));
    for (a, h) in scheme.hamiltonians().iter().enumerate() {
        let lo = h.inverse(Side::Minus, level);
        let hi = h.inverse(Side::Plus, level);
        for i in 1..i_max {
            let p = u.forward_gradient(a, i);
            if outside(p, lo, hi) > GRADIENT_SLACK * (1.0 + p.abs()) {
                mon.time_derivative_bound_violations += 1;
            }
        }
        let p0 = u.forward_gradient(a, 0);
        if origin.feasible && origin.thresholds[a] - p0 > GRADIENT_SLACK * (1.0 + p0.abs()) {
            mon.time_derivative_bound_violations += 1;
        }
    }
}

/// `max_{a,i} D_{i,+}^{a,n}` between two consecutive states. Each interval
/// sup of `|H'|` uses its endpoints and three interior samples; the origin
/// term uses a 5-point-per-axis grid with local refinement.
pub fn cfl_margin(scheme: &Scheme, before: &GridField, after: &GridField) -> f64 {
    let i_max = scheme.grid().i_max();
    let mut d = 0.0f64;
    for (a, h) in scheme.hamiltonians().iter().enumerate() {
        for i in 0..=i_max {
            let p = scheme.p_plus(before, a, i);
            let q = scheme.p_plus(after, a, i);
            let (lo, hi) = (p.min(q), p.max(q));
            d = d.max(sampled_sup(|x| h.deriv(x).abs(), lo, hi, 5));
        }
    }
    let box_: Vec<(f64, f64)> = scheme
        .origin_gradients(before)
        .into_iter()
        .zip(scheme.origin_gradients(after))
        .map(|(p, q)| (p.min(q), p.max(q)))
        .collect();
    let f = scheme.junction_function();
    d.max(box_sup(|p| f.neg_divergence(p), &box_, 5).0)
}

/// Evolves `u0` and `v0` (with `u0 <= v0`) under the same scheme and reports
/// whether the order survives every step up to a `1e-13` slack.
pub fn discrete_comparison_check(scheme: &Scheme, u0: &GridField, v0: &GridField, dt: f64, steps: usize) -> Result<bool> {
    let ordered = |u: &GridField, v: &GridField| u.values().zip(v.values()).all(|(a, b)| a <= b + 1e-13);
    if !ordered(u0, v0) {
        return Err(Error::InvalidArgument("comparison check needs u0 <= v0 nodewise".into()));
    }
    let (mut u, mut v) = (u0.clone(), v0.clone());
    for n in 0..steps {
        u = scheme.step(&u, dt, n)?.0;
        v = scheme.step(&v, dt, n)?.0;
        if !ordered(&u, &v) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::FluxLimitedF;
    use crate::junction::{sample_initial, Junction};

    fn p2() -> Hamiltonian {
        Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap()
    }

    fn setup(n: usize, a: f64, dx: f64, i_max: usize, u0: impl Fn(f64) -> f64) -> (Scheme, GridField) {
        let grid = Grid::new(Junction::new(n).unwrap(), dx, i_max).unwrap();
        let field = sample_initial(&grid, |x| u0(x.coordinate)).unwrap();
        let f = Arc::new(FluxLimitedF::new(a, vec![p2(); n]).unwrap());
        let s = Scheme::new(&field, vec![p2(); n], f, BoundaryClosure::FrozenGradient).unwrap();
        (s, field)
    }

    #[test]
    fn numerical_hamiltonian_examples() {
        let h = p2();
        assert_eq!(numerical_hamiltonian(&h, -1.0, 0.0), 1.0);
        assert_eq!(numerical_hamiltonian(&h, 0.0, 0.0), 0.0);
        assert_eq!(numerical_hamiltonian(&h, 2.0, -2.0), 0.0);
    }

    #[test]
    fn bln_examples() {
        assert_eq!(bln_flux_limiter(&p2(), 2.0), 4.0);
        assert_eq!(bln_flux_limiter(&p2(), -2.0), 0.0);
        assert_eq!(bln_flux_limiter(&Hamiltonian::quadratic(1.0, 1.0, 0.0).unwrap(), 1.0), 0.0);
    }

    #[test]
    fn step_from_zero_with_active_limiter() {
        let (s, u) = setup(2, 1.0, 0.5, 6, |_| 0.0);
        let (next, w) = s.step(&u, 0.1, 0).unwrap();
        assert!((next.origin() + 0.1).abs() < 1e-15);
        assert_eq!(w.origin(), -1.0);
        assert!(next.branch(0).iter().chain(next.branch(1)).all(|&v| v == 0.0));
    }

    #[test]
    fn step_interior_hand_example() {
        let grid = Grid::new(Junction::new(1).unwrap(), 1.0, 3).unwrap();
        let u = GridField::from_parts(grid, 0.0, vec![vec![0.0, -1.0, -1.0]]).unwrap();
        let f = Arc::new(FluxLimitedF::new(f64::NEG_INFINITY, vec![p2()]).unwrap());
        let s = Scheme::new(&u, vec![p2()], f, BoundaryClosure::FrozenGradient).unwrap();
        let (next, _) = s.step(&u, 0.1, 0).unwrap();
        assert!((next.get(0, 1) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn affine_profile_travels() {
        let slope = 0.7;
        let (s, u) = setup(2, 0.0, 0.25, 8, |x| slope * x);
        let (next, _) = s.step(&u, 0.05, 0).unwrap();
        for a in 0..2 {
            for i in 1..=8 {
                let expected = u.get(a, i) - 0.05 * slope * slope;
                assert!((next.get(a, i) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cfl_examples() {
        let dx = 0.1;
        let (s, u) = setup(2, 1.0, dx, 20, |_| 0.0);
        let c = compute_cfl(&s, &u).unwrap();
        assert_eq!(c.bounds.m0, -1.0);
        assert_eq!(c.bounds.lower, vec![-1.0, -1.0]);
        assert_eq!(c.bounds.upper, vec![1.0, 1.0]);
        assert_eq!(c.bounds.lower_origin, vec![-1.0, -1.0]);
        assert!((c.hamiltonian_speed - 2.0).abs() < 1e-12);
        assert!((c.junction_speed - 2.0).abs() < 1e-9);
        assert!((c.dt_max - dx / 2.0).abs() < 1e-10);

        let (s, u) = setup(1, f64::NEG_INFINITY, dx, 20, |_| 0.0);
        let c = compute_cfl(&s, &u).unwrap();
        assert_eq!(c.bounds.m0, 0.0);
        assert_eq!(c.bounds.lower, vec![-1.0]);
        assert_eq!(c.bounds.upper, vec![1.0]);
    }

    #[test]
    fn modified_hamiltonian_examples() {
        let (h, m) = build_modified_hamiltonian(&p2(), -1.0, 1.0).unwrap();
        assert_eq!(m.slope_bound(), 2.0);
        assert_eq!(h.eval(2.0), 2.0);
        assert_eq!(h.eval(-3.0), 3.0);
        for p in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_eq!(h.eval(p), p2().eval(p));
        }
        assert_eq!(h.p0(), 0.0);
        assert!((h.inverse(Side::Plus, 3.0) - 3.0).abs() < 1e-15);
        assert!((h.inverse(Side::Minus, 3.0) + 3.0).abs() < 1e-15);
        assert!((h.inverse(Side::Plus, 0.25) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stability_constant_examples() {
        let f1 = FluxLimitedF::new(1.0, vec![p2(); 2]).unwrap();
        assert_eq!(stability_constant(0.0, &[p2(), p2()], &f1, Some(1.0)), 1.0);
        let f0 = FluxLimitedF::new(0.0, vec![p2(); 2]).unwrap();
        assert_eq!(stability_constant(1.0, &[p2(), p2()], &f0, Some(0.0)), 1.0);
        assert_eq!(stability_constant(2.0, &[p2(), p2()], &f1, Some(1.0)), 4.0);
    }

    #[test]
    fn conservation_field_examples() {
        let (_, u) = setup(3, 0.0, 0.5, 6, |x| x);
        let v = extract_conservation_field(&u);
        assert!(v.values.iter().flatten().all(|&x| (x - 1.0).abs() < 1e-15));
        let (_, c) = setup(2, 0.0, 0.5, 6, |_| 3.0);
        assert!(extract_conservation_field(&c).values.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_data_stays_zero_at_a0() {
        let (s, u) = setup(2, 0.0, 0.1, 10, |_| 0.0);
        let cfg = SchemeConfig::new(0.1, 0.04, 1.0).unwrap();
        let r = run(&s, &u, &cfg, &RunOptions::default(), |_, _, _| {}).unwrap();
        assert_eq!(r.steps, 25);
        assert!(r.final_state.values().all(|v| v == 0.0));
    }

    #[test]
    fn comparison_examples() {
        let (s, u) = setup(2, 1.0, 0.1, 20, |x| (x - 0.5).abs());
        let v = u.map(|x| x + 1.0);
        assert!(discrete_comparison_check(&s, &u, &v, 0.02, 50).unwrap());
        assert!(discrete_comparison_check(&s, &u, &u, 0.02, 50).unwrap());
        assert!(discrete_comparison_check(&s, &v, &u, 0.02, 5).is_err());
    }

    #[test]
    fn n_t_handles_rounding() {
        let cfg = SchemeConfig::new(0.1, 0.1, 0.3).unwrap();
        assert_eq!(cfg.n_t(), 3);
    }
}
