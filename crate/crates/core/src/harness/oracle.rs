//! Exact and reference solutions used to measure errors.

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::junction::{Grid, GridField};
use crate::numerics::{bisect_switch, golden_section_min, sampled_sup, TOL_X};
use crate::scheme::compute_cfl;

use super::problem::{Problem, Profile};

const BRACKET_CAP: f64 = 1.152_921_504_606_847e18; // 2^60

/// `H*(q) = sup_p (p q - H(p))` for a convex Hamiltonian, through the
/// maximizer `H'(p) = q`. Returns `+inf` when `q` is not a slope of `H`.
pub fn convex_conjugate(h: &Hamiltonian, q: f64) -> f64 {
    let p0 = h.p0();
    let d0 = h.deriv(p0);
    let (lo, hi) = if q >= d0 {
        let mut step = 1.0;
        while h.deriv(p0 + step) < q {
            step *= 2.0;
            if step > BRACKET_CAP {
                return f64::INFINITY;
            }
        }
        (p0, p0 + step)
    } else {
        let mut step = 1.0;
        while h.deriv(p0 - step) >= q {
            step *= 2.0;
            if step > BRACKET_CAP {
                return f64::INFINITY;
            }
        }
        (p0 - step, p0)
    };
    let (a, b) = bisect_switch(lo, hi, |p| h.deriv(p) >= q);
    let p = 0.5 * (a + b);
    p * q - h.eval(p)
}

/// `min_y u0(y) + t H*((z - y) / t)` for a convex `H` and piecewise-linear
/// `u0`. Between breakpoints the objective is convex, so each piece is
/// minimized by golden section.
pub fn hopf_lax_oracle(u0: &Profile, h: &Hamiltonian, t: f64, z: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(u0.eval(z));
    }
    if h.convexity_modulus().is_none() {
        return Err(Error::HypothesisViolation(
            "the Hopf-Lax oracle needs a uniformly convex Hamiltonian".into(),
        ));
    }
    let l = u0.lipschitz();
    let speed = sampled_sup(|p| h.deriv(p).abs(), -l, l, 9).max(h.deriv(-l).abs()).max(h.deriv(l).abs());
    let half = t * speed * 1.05 + 1e-9 * (1.0 + z.abs());
    let (lo, hi) = (z - half, z + half);
    let mut knots = vec![lo];
    knots.extend(u0.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    knots.push(hi);
    let obj = |y: f64| u0.eval(y) + t * convex_conjugate(h, (z - y) / t);
    let mut best = f64::INFINITY;
    for w in knots.windows(2) {
        let (_, v) = golden_section_min(obj, w[0], w[1], TOL_X * (1.0 + (w[1] - w[0]).abs()));
        best = best.min(v);
    }
    for &k in &knots {
        best = best.min(obj(k));
    }
    Ok(best)
}

/// Trajectory of the scheme on the grid refined by `refinement`, restricted
/// to the nodes of `coarse` at the coarse times `n dt`, `n = 0..=steps`.
///
/// The fine step is `dt / k` with the smallest `k` meeting the fine CFL
/// bound, so the two time grids nest.
pub fn reference_solution(
    problem: &Problem,
    coarse: &Grid,
    dt: f64,
    steps: usize,
    refinement: usize,
) -> Result<Vec<GridField>> {
    if refinement < 8 {
        return Err(Error::InvalidArgument(format!(
            "reference refinement must be at least 8, got {refinement}"
        )));
    }
    let fine = Grid::new(*coarse.junction(), coarse.dx() / refinement as f64, coarse.i_max() * refinement)?;
    let (scheme, mut u) = problem.scheme(&fine)?;
    let cfl = compute_cfl(&scheme, &u)?;
    let sub = if cfl.dt_max.is_finite() {
        (dt / (problem.cfl_safety() * cfl.dt_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    } else {
        1
    };
    let dt_fine = dt / sub as f64;
    let restrict = |u: &GridField| -> Result<GridField> {
        let branches = (0..coarse.num_branches())
            .map(|a| (1..=coarse.i_max()).map(|i| u.get(a, i * refinement)).collect())
            .collect();
        GridField::from_parts(*coarse, u.origin(), branches)
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(restrict(&u)?);
    for n in 0..steps {
        for k in 0..sub {
            u = scheme.step(&u, dt_fine, n * sub + k)?.0;
        }
        out.push(restrict(&u)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Hamiltonian {
        Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn conjugate_of_quadratic() {
        let h = Hamiltonian::quadratic(0.5, 2.0, 1.0).unwrap();
        for q in [-3.0, -0.1, 0.0, 0.7, 5.0] {
            let exact = q * q / 8.0 + 0.5 * q - 1.0;
            assert!((convex_conjugate(&h, q) - exact).abs() < 1e-12, "q = {q}");
        }
    }

    #[test]
    fn cone_example() {
        let u0 = Profile::Cone { slope: 1.0 };
        let h = p2();
        assert!((hopf_lax_oracle(&u0, &h, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-12);
        for (t, x) in [(0.5f64, 0.3f64), (1.0, 3.0), (0.2, -1.0)] {
            let exact: f64 = if x.abs() <= 2.0 * t { x * x / (4.0 * t) } else { x.abs() - t };
            assert!((hopf_lax_oracle(&u0, &h, t, x).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_and_affine_data() {
        let h = p2();
        assert!(hopf_lax_oracle(&Profile::Zero, &h, 0.7, 0.3).unwrap().abs() < 1e-14);
        let u0 = Profile::Affine { height: 0.5, slope: -0.8 };
        for x in [-1.0, 0.0, 2.5] {
            let exact = 0.5 - 0.8 * x - 0.3 * 0.64;
            assert!((hopf_lax_oracle(&u0, &h, 0.3, x).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_convex() {
        let h = Hamiltonian::abs_value(0.0, 1.0, 0.0).unwrap();
        assert!(hopf_lax_oracle(&Profile::Zero, &h, 1.0, 0.0).is_err());
        assert!(hopf_lax_oracle(&Profile::Zero, &p2(), -1.0, 0.0).is_err());
    }
}
