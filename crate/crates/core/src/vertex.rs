//! The vertex test function `G(x, y)` for smooth uniformly convex
//! Hamiltonians: level solver, value and gradient, closed-form Hessian and a
//! sampled certificate of its structural properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{compute_a0, FluxLimitedF, JunctionFunction};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Side};
use crate::junction::{Junction, JunctionPoint};
use crate::numerics::bisect_switch;

/// Kink smoothing of the same-branch part on `|q| <= delta`:
/// `g(q) = a q + k (q + delta)^2` joins the slopes `a = pi^-(A_g)` and
/// `b = pi^+(A_g)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinkSmoothing {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub curvature: f64,
}

impl KinkSmoothing {
    fn new(h: &Hamiltonian, a_gamma: f64, gamma: f64) -> Self {
        let a = h.inverse(Side::Minus, a_gamma);
        let b = h.inverse(Side::Plus, a_gamma);
        let delta = (2.0 * gamma / (b - a))
            .min(0.5 * h.deriv(b))
            .min(0.5 * h.deriv(a).abs());
        Self {
            a,
            b,
            delta,
            curvature: 2.0 * (b - a) / (4.0 * delta),
        }
    }

    fn eval(&self, q: f64) -> (f64, f64, f64) {
        let k = 0.5 * self.curvature;
        let s = q + self.delta;
        (self.a * q + k * s * s, self.a + 2.0 * k * s, self.curvature)
    }
}

/// Value, gradient and (where defined) Hessian of `G` at one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexEval {
    pub value: f64,
    pub gx: f64,
    pub gy: f64,
}

/// `(G_xx, G_yy, G_xy)` together with whether the pair lies in the
/// foliation region; in the linear region all three are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexHessian {
    pub gxx: f64,
    pub gyy: f64,
    pub gxy: f64,
    pub foliation: bool,
}

impl VertexHessian {
    pub fn sup_norm(&self) -> f64 {
        self.gxx.abs().max(self.gyy.abs()).max(self.gxy.abs())
    }
}

/// Solution of the level equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub lambda: f64,
    pub foliation: bool,
}

#[derive(Debug, Clone)]
pub struct VertexTestFunction {
    hamiltonians: Vec<Hamiltonian>,
    shifts: Vec<f64>,
    gamma: f64,
    limiter: f64,
    a_gamma: f64,
    radius: f64,
    smoothing: Vec<KinkSmoothing>,
}

impl VertexTestFunction {
    /// Requires smooth Hamiltonians with a positive convexity modulus. They
    /// are tilted so that each attains its minimum at `p = 0`.
    pub fn new(hamiltonians: &[Hamiltonian], limiter: f64, gamma: f64, radius: f64) -> Result<Self> {
        if hamiltonians.is_empty() {
            return Err(Error::InvalidArgument("vertex test function needs at least one branch".into()));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        if limiter.is_nan() || limiter == f64::INFINITY {
            return Err(Error::InvalidArgument(format!("invalid flux limiter {limiter}")));
        }
        for (a, h) in hamiltonians.iter().enumerate() {
            match h.convexity_modulus() {
                Some(m) if m > 0.0 => {}
                _ => {
                    return Err(Error::HypothesisViolation(format!(
                        "Hamiltonian on branch {} is not known to be smooth and uniformly convex",
                        a + 1
                    )))
                }
            }
        }
        let (hamiltonians, shifts): (Vec<_>, Vec<_>) = hamiltonians.iter().map(Hamiltonian::tilt_normalize).unzip();
        let a_gamma = limiter.max(compute_a0(&hamiltonians) + gamma);
        let smoothing = hamiltonians
            .iter()
            .map(|h| KinkSmoothing::new(h, a_gamma, gamma))
            .collect();
        Ok(Self {
            hamiltonians,
            shifts,
            gamma,
            limiter,
            a_gamma,
            radius,
            smoothing,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn limiter(&self) -> f64 {
        self.limiter
    }

    /// `A_g = max(A, A0 + gamma)`.
    pub fn a_gamma(&self) -> f64 {
        self.a_gamma
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn num_branches(&self) -> usize {
        self.hamiltonians.len()
    }

    /// Tilted Hamiltonians the function is built from.
    pub fn hamiltonians(&self) -> &[Hamiltonian] {
        &self.hamiltonians
    }

    pub fn tilt_shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn smoothing(&self) -> &[KinkSmoothing] {
        &self.smoothing
    }

    /// `F_{A_g}` built from the tilted Hamiltonians.
    pub fn junction_function(&self) -> FluxLimitedF {
        FluxLimitedF::new(self.a_gamma, self.hamiltonians.clone()).expect("finite limiter")
    }

    /// Level `lambda >= A_g` maximizing `pi_a^+(l) x - pi_b^-(l) y - l`.
    /// `plus`/`minus` carry the Hamiltonian and the non-negative weight.
    fn solve_level(&self, plus: Option<(&Hamiltonian, f64)>, minus: Option<(&Hamiltonian, f64)>) -> Result<Level> {
        let residual = |l: f64| {
            let mut r = -1.0;
            if let Some((h, x)) = plus {
                if x > 0.0 {
                    r += x / h.deriv(h.inverse(Side::Plus, l));
                }
            }
            if let Some((h, y)) = minus {
                if y > 0.0 {
                    r -= y / h.deriv(h.inverse(Side::Minus, l));
                }
            }
            r
        };
        let lo = self.a_gamma;
        if !(residual(lo) > 0.0) {
            return Ok(Level {
                lambda: lo,
                foliation: false,
            });
        }
        let mut width = 1.0f64;
        let hi = loop {
            let hi = lo + width;
            if residual(hi) <= 0.0 {
                break hi;
            }
            width *= 2.0;
            if width > 2f64.powi(60) {
                return Err(Error::Numerical(format!(
                    "level equation has no root above {lo} (weights {:?}, {:?})",
                    plus.map(|p| p.1),
                    minus.map(|m| m.1)
                )));
            }
        };
        let (l, r) = bisect_switch(lo, hi, |l| residual(l) <= 0.0);
        Ok(Level {
            lambda: 0.5 * (l + r),
            foliation: true,
        })
    }

    /// Level for `x` on branch `alpha` and `y` on branch `beta != alpha`.
    pub fn solve_lambda(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<Level> {
        self.check_pair(alpha, x, beta, y)?;
        if alpha == beta {
            return Err(Error::InvalidArgument("solve_lambda needs two different branches".into()));
        }
        self.solve_level(Some((&self.hamiltonians[alpha], x)), Some((&self.hamiltonians[beta], y)))
    }

    fn check_pair(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<()> {
        let n = self.num_branches();
        if alpha >= n || beta >= n {
            return Err(Error::InvalidArgument(format!("branch out of range for {n} branches")));
        }
        if !(x >= 0.0 && y >= 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!("coordinates must be non-negative, got ({x}, {y})")));
        }
        Ok(())
    }

    fn cross(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<(VertexEval, Level)> {
        let ha = &self.hamiltonians[alpha];
        let hb = &self.hamiltonians[beta];
        let level = self.solve_level(Some((ha, x)), Some((hb, y)))?;
        let p = ha.inverse(Side::Plus, level.lambda);
        let q = hb.inverse(Side::Minus, level.lambda);
        Ok((
            VertexEval {
                value: self.a_gamma + p * x - q * y - level.lambda,
                gx: p,
                gy: -q,
            },
            level,
        ))
    }

    /// Same-branch profile `g(q)`, `q = x - y`: value, slope and curvature.
    fn same(&self, alpha: usize, q: f64) -> Result<(f64, f64, f64, bool)> {
        let s = &self.smoothing[alpha];
        if q.abs() <= s.delta {
            let (v, d, c) = s.eval(q);
            return Ok((v, d, c, true));
        }
        let h = &self.hamiltonians[alpha];
        let (level, p) = if q > 0.0 {
            let l = self.solve_level(Some((h, q)), None)?;
            (l, h.inverse(Side::Plus, l.lambda))
        } else {
            let l = self.solve_level(None, Some((h, -q)))?;
            (l, h.inverse(Side::Minus, l.lambda))
        };
        let curvature = if level.foliation { 1.0 / h.second_deriv(p) } else { 0.0 };
        Ok((self.a_gamma + p * q - level.lambda, p, curvature, level.foliation))
    }

    /// Branch labels used for a pair: a point at the origin is attached to a
    /// branch different from the other point's whenever possible.
    fn labels(&self, x: JunctionPoint, y: JunctionPoint) -> (usize, usize) {
        let n = self.num_branches();
        let other = |b: usize| if n == 1 { b } else { (b + 1) % n };
        match (x.is_origin(), y.is_origin()) {
            (true, true) => (0, other(0)),
            (true, false) => (other(y.branch), y.branch),
            (false, true) => (x.branch, other(x.branch)),
            (false, false) => (x.branch, y.branch),
        }
    }

    /// `G(x, y)` with its derivatives along the branches the points lie on.
    pub fn value_grad(&self, x: JunctionPoint, y: JunctionPoint) -> Result<VertexEval> {
        let (alpha, beta) = self.labels(x, y);
        self.value_grad_on(alpha, x.coordinate, beta, y.coordinate)
    }

    /// `G` for `x` on branch `alpha` and `y` on branch `beta`, without
    /// identifying origin points.
    pub fn value_grad_on(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<VertexEval> {
        self.check_pair(alpha, x, beta, y)?;
        if alpha != beta {
            return Ok(self.cross(alpha, x, beta, y)?.0);
        }
        let (v, d, _, _) = self.same(alpha, x - y)?;
        Ok(VertexEval { value: v, gx: d, gy: -d })
    }

    /// Closed-form second derivatives for `x` on `alpha`, `y` on `beta`.
    pub fn hessian_on(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<VertexHessian> {
        self.check_pair(alpha, x, beta, y)?;
        if alpha == beta {
            let (_, _, c, foliation) = self.same(alpha, x - y)?;
            return Ok(VertexHessian {
                gxx: c,
                gyy: c,
                gxy: -c,
                foliation,
            });
        }
        let (_, level) = self.cross(alpha, x, beta, y)?;
        if !level.foliation {
            return Ok(VertexHessian {
                gxx: 0.0,
                gyy: 0.0,
                gxy: 0.0,
                foliation: false,
            });
        }
        let ha = &self.hamiltonians[alpha];
        let hb = &self.hamiltonians[beta];
        let p = ha.inverse(Side::Plus, level.lambda);
        let q = hb.inverse(Side::Minus, level.lambda);
        let (a, b) = (ha.deriv(p), hb.deriv(q));
        let (a2, b2) = (ha.second_deriv(p), hb.second_deriv(q));
        // derivative in lambda of the level equation; negative
        let phi = -x * a2 / (a * a * a) + y * b2 / (b * b * b);
        Ok(VertexHessian {
            gxx: -1.0 / (a * a * phi),
            gyy: -1.0 / (b * b * phi),
            gxy: 1.0 / (a * b * phi),
            foliation: true,
        })
    }

    pub fn hessian(&self, x: JunctionPoint, y: JunctionPoint) -> Result<VertexHessian> {
        let (alpha, beta) = self.labels(x, y);
        self.hessian_on(alpha, x.coordinate, beta, y.coordinate)
    }

    /// `H(x, p)`: `H_a(p_a)` on a branch, `F_{A_g}(p)` at the origin, where
    /// `slope(b)` is the derivative along branch `b`.
    fn h_at(&self, point: JunctionPoint, mut slope: impl FnMut(usize) -> Result<f64>) -> Result<f64> {
        if point.is_origin() {
            let p: Vec<f64> = (0..self.num_branches()).map(&mut slope).collect::<Result<_>>()?;
            Ok(self.junction_function().value(&p))
        } else {
            Ok(self.hamiltonians[point.branch].eval(slope(point.branch)?))
        }
    }

    /// `H(y, -G_y) - H(x, G_x)`.
    pub fn compatibility_defect(&self, x: JunctionPoint, y: JunctionPoint) -> Result<f64> {
        let (xa, yb) = self.labels(x, y);
        let (xc, yc) = (x.coordinate, y.coordinate);
        let hx = self.h_at(x, |b| {
            let lab = if x.is_origin() { b } else { xa };
            Ok(self.value_grad_on(lab, xc, yb, yc)?.gx)
        })?;
        let hy = self.h_at(y, |b| {
            let lab = if y.is_origin() { b } else { yb };
            Ok(-self.value_grad_on(xa, xc, lab, yc)?.gy)
        })?;
        Ok(hy - hx)
    }
}

/// Sampled certificate of the properties of `G` on `{d(x, y) <= K}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexCertificate {
    pub hypothesis_class: String,
    pub gamma: f64,
    pub a_gamma: f64,
    pub radius: f64,
    pub sample_count: usize,
    pub min_value: f64,
    pub diagonal_defect_max: f64,
    pub compatibility_defect_max: f64,
    pub gradient_bound: f64,
    pub superlinearity_failures: usize,
    pub hessian_sup: f64,
    pub hessian_sup_cross: f64,
    pub hessian_sup_same: f64,
    pub hessian_fd_checked: usize,
    pub hessian_fd_max_rel_error: f64,
}

impl VertexCertificate {
    pub fn passed(&self) -> bool {
        self.min_value >= -1e-12
            && self.diagonal_defect_max <= self.gamma
            && self.compatibility_defect_max <= self.gamma
            && self.superlinearity_failures == 0
            && self.hessian_fd_max_rel_error <= 1e-5
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Acc {
    min_value: f64,
    compat: f64,
    grad: f64,
    superlinear_failures: usize,
    hess_cross: f64,
    hess_same: f64,
    fd_checked: usize,
    fd_err: f64,
}

impl Acc {
    fn empty() -> Self {
        Self {
            min_value: f64::INFINITY,
            compat: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            min_value: self.min_value.min(o.min_value),
            compat: self.compat.max(o.compat),
            grad: self.grad.max(o.grad),
            superlinear_failures: self.superlinear_failures + o.superlinear_failures,
            hess_cross: self.hess_cross.max(o.hess_cross),
            hess_same: self.hess_same.max(o.hess_same),
            fd_checked: self.fd_checked + o.fd_checked,
            fd_err: self.fd_err.max(o.fd_err),
        }
    }
}

const FD_STEP: f64 = 1e-4;

fn rel_err(fd: f64, exact: f64) -> f64 {
    (fd - exact).abs() / exact.abs().max(1e-12)
}

fn sample_pair(rng: &mut ChaCha8Rng, n: usize, k: f64) -> (usize, f64, usize, f64) {
    let alpha = rng.gen_range(0..n);
    let beta = rng.gen_range(0..n);
    let edge: f64 = rng.gen();
    let mut x = rng.gen_range(0.0..=k);
    let mut y = if alpha == beta {
        rng.gen_range((x - k).max(0.0)..=(x + k))
    } else {
        rng.gen_range(0.0..=(k - x))
    };
    if edge < 0.05 {
        x = 0.0;
    } else if edge < 0.1 {
        y = 0.0;
    }
    (alpha, x, beta, y)
}

impl VertexTestFunction {
    fn superlinear(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<bool> {
        let d = if alpha == beta { (x - y).abs() } else { x + y };
        if d == 0.0 {
            return Ok(true);
        }
        let scale = 0.5 * self.radius / d;
        let (x, y) = (x * scale, y * scale);
        let d = 0.5 * self.radius;
        let mut prev = f64::NEG_INFINITY;
        for s in [1.0, 2.0, 4.0, 8.0] {
            let ratio = self.value_grad_on(alpha, s * x, beta, s * y)?.value / (s * d);
            if !(ratio > prev) {
                return Ok(false);
            }
            prev = ratio;
        }
        Ok(true)
    }

    /// Finite-difference Hessian from the analytic gradients, or `None` when
    /// the stencil leaves the foliation region or the branch interiors.
    fn fd_hessian(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<Option<VertexHessian>> {
        let h = FD_STEP;
        if alpha == beta || x < 2.0 * h || y < 2.0 * h {
            return Ok(None);
        }
        let pts = [(x + h, y), (x - h, y), (x, y + h), (x, y - h)];
        let mut grads = [(0.0, 0.0); 4];
        for (g, &(px, py)) in grads.iter_mut().zip(&pts) {
            let (e, level) = self.cross(alpha, px, beta, py)?;
            if !level.foliation || level.lambda <= self.a_gamma * (1.0 + 1e-6) + 1e-6 {
                return Ok(None);
            }
            *g = (e.gx, e.gy);
        }
        Ok(Some(VertexHessian {
            gxx: (grads[0].0 - grads[1].0) / (2.0 * h),
            gyy: (grads[2].1 - grads[3].1) / (2.0 * h),
            gxy: 0.5 * ((grads[2].0 - grads[3].0) + (grads[0].1 - grads[1].1)) / (2.0 * h),
            foliation: true,
        }))
    }

    fn sample_stats(&self, alpha: usize, x: f64, beta: usize, y: f64) -> Result<Acc> {
        let mut acc = Acc::empty();
        let e = self.value_grad_on(alpha, x, beta, y)?;
        acc.min_value = e.value;
        acc.grad = e.gx.abs() + e.gy.abs();
        let xp = JunctionPoint { branch: alpha, coordinate: x };
        let yp = JunctionPoint { branch: beta, coordinate: y };
        acc.compat = self.compatibility_defect(xp, yp)?;
        if !self.superlinear(alpha, x, beta, y)? {
            acc.superlinear_failures = 1;
        }
        let hs = self.hessian_on(alpha, x, beta, y)?;
        if alpha == beta {
            acc.hess_same = hs.sup_norm();
        } else {
            acc.hess_cross = hs.sup_norm();
            if let Some(fd) = self.fd_hessian(alpha, x, beta, y)? {
                acc.fd_checked = 1;
                acc.fd_err = rel_err(fd.gxx, hs.gxx)
                    .max(rel_err(fd.gyy, hs.gyy))
                    .max(rel_err(fd.gxy, hs.gxy));
            }
        }
        Ok(acc)
    }

    /// Random pairs with `d(x, y) <= K` plus a deterministic grid on every
    /// ordered branch pair and the diagonal of every branch.
    pub fn certify(&self, sample_count: usize, seed: u64) -> Result<VertexCertificate> {
        let n = self.num_branches();
        let k = self.radius;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs: Vec<(usize, f64, usize, f64)> = (0..sample_count).map(|_| sample_pair(&mut rng, n, k)).collect();
        let m = 80;
        for alpha in 0..n {
            for beta in 0..n {
                for i in 0..=m {
                    for j in 0..=m {
                        let x = k * i as f64 / m as f64;
                        let y = k * j as f64 / m as f64;
                        let d = if alpha == beta { (x - y).abs() } else { x + y };
                        if d <= k {
                            pairs.push((alpha, x, beta, y));
                        }
                    }
                }
            }
        }
        let acc = pairs
            .par_iter()
            .map(|&(a, x, b, y)| self.sample_stats(a, x, b, y))
            .try_reduce(Acc::empty, |l, r| Ok(l.merge(r)))?;
        let junction = Junction::new(n)?;
        let mut diagonal = 0.0f64;
        for b in 0..n {
            for i in 0..=200 {
                let x = junction.point(b, k * i as f64 / 200.0)?;
                diagonal = diagonal.max(self.value_grad(x, x)?.value);
            }
        }
        Ok(VertexCertificate {
            hypothesis_class: "smooth uniformly convex".into(),
            gamma: self.gamma,
            a_gamma: self.a_gamma,
            radius: k,
            sample_count: pairs.len(),
            min_value: acc.min_value,
            diagonal_defect_max: diagonal,
            compatibility_defect_max: acc.compat,
            gradient_bound: acc.grad,
            superlinearity_failures: acc.superlinear_failures,
            hessian_sup: acc.hess_cross.max(acc.hess_same),
            hessian_sup_cross: acc.hess_cross,
            hessian_sup_same: acc.hess_same,
            hessian_fd_checked: acc.fd_checked,
            hessian_fd_max_rel_error: acc.fd_err,
        })
    }
}

pub fn certify_vertex(g: &VertexTestFunction, sample_count: usize, seed: u64) -> Result<VertexCertificate> {
    g.certify(sample_count, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Hamiltonian {
        Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap()
    }

    fn quad_pair(gamma: f64) -> VertexTestFunction {
        VertexTestFunction::new(&[p2(), p2()], 0.0, gamma, 5.0).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let g = quad_pair(0.1);
        // closed form for two unit quadratics: lambda = (x + y)^2 / 4
        let l = g.solve_lambda(0, 1.0, 1, 1.0).unwrap();
        assert!(l.foliation && (l.lambda - 1.0).abs() < 1e-14);
        let l = g.solve_lambda(0, 3.0, 1, 1.0).unwrap();
        assert!((l.lambda - 4.0).abs() < 1e-13);
        let g5 = VertexTestFunction::new(&[p2(), p2()], 0.5, 0.1, 5.0).unwrap();
        let l = g5.solve_lambda(0, 0.1, 1, 0.1).unwrap();
        assert!(!l.foliation && l.lambda == 0.5);
        assert!(g.solve_lambda(0, 1.0, 0, 1.0).is_err());
    }

    #[test]
    fn value_and_gradient_examples() {
        let g = quad_pair(0.1);
        let e = g.value_grad_on(0, 1.0, 1, 1.0).unwrap();
        // (x + y)^2 / 4 plus the additive normalization A_g
        assert!((e.value - (1.0 + g.a_gamma())).abs() < 1e-13);
        assert!((e.gx - 1.0).abs() < 1e-14 && (e.gy - 1.0).abs() < 1e-14);
        let o = JunctionPoint::origin();
        assert!(g.value_grad(o, o).unwrap().value.abs() < 1e-15);
        let x = JunctionPoint::new(1, 0.7).unwrap();
        assert!(g.value_grad(x, x).unwrap().value <= g.gamma());
    }

    #[test]
    fn hessian_examples() {
        let g = quad_pair(0.1);
        for (x, y) in [(1.0, 1.0), (2.0, 0.5), (0.3, 3.0)] {
            let h = g.hessian_on(0, x, 1, y).unwrap();
            assert!(h.foliation);
            for v in [h.gxx, h.gyy, h.gxy] {
                assert!((v - 0.5).abs() < 1e-12, "{v}");
            }
        }
        let lin = g.hessian_on(0, 0.1, 1, 0.1).unwrap();
        assert_eq!((lin.gxx, lin.gyy, lin.gxy, lin.foliation), (0.0, 0.0, 0.0, false));
    }

    #[test]
    fn hessian_matches_finite_differences_for_unequal_hamiltonians() {
        let h1 = Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap();
        let h2 = Hamiltonian::quadratic(0.0, 3.0, 1.0).unwrap();
        let g = VertexTestFunction::new(&[h1, h2], 0.0, 0.05, 5.0).unwrap();
        for (a, b) in [(0, 1), (1, 0)] {
            for (x, y) in [(1.0, 2.0), (2.5, 0.4), (0.6, 1.1)] {
                let exact = g.hessian_on(a, x, b, y).unwrap();
                let fd = g.fd_hessian(a, x, b, y).unwrap().unwrap();
                assert!(rel_err(fd.gxx, exact.gxx) < 1e-5);
                assert!(rel_err(fd.gyy, exact.gyy) < 1e-5);
                assert!(rel_err(fd.gxy, exact.gxy) < 1e-5, "{:?} vs {:?}", fd, exact);
            }
        }
    }

    #[test]
    fn smoothing_meets_linear_parts() {
        let g = quad_pair(0.1);
        let s = g.smoothing()[0];
        let eps = 1e-9;
        let inside = g.value_grad_on(0, 1.0 + s.delta - eps, 0, 1.0).unwrap();
        let outside = g.value_grad_on(0, 1.0 + s.delta + eps, 0, 1.0).unwrap();
        assert!((inside.value - outside.value).abs() < 1e-8);
        assert!((inside.gx - outside.gx).abs() < 1e-7);
    }

    #[test]
    fn rejects_non_smooth_hamiltonians() {
        let h = Hamiltonian::abs_value(0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            VertexTestFunction::new(&[h.clone(), h], 0.0, 0.1, 1.0),
            Err(Error::HypothesisViolation(_))
        ));
    }
}
