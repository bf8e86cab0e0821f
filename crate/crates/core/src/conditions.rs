//! Junction functions: the flux-limited `F_A`, general monotone `F`, the
//! lower inverse `p(K)` and the modification `F~` outside a gradient box.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Side};
use crate::numerics::{bisect_switch, box_sup, fd_step, TOL_F};

/// A junction function `F : R^N -> R`, non-increasing in every coordinate.
pub trait JunctionFunction: Send + Sync + fmt::Debug {
    fn num_branches(&self) -> usize;

    fn value(&self, p: &[f64]) -> f64;

    /// Partial derivatives by central differences unless overridden.
    fn partials(&self, p: &[f64]) -> Vec<f64> {
        let mut q = p.to_vec();
        (0..p.len())
            .map(|a| {
                let h = fd_step(p[a]);
                q[a] = p[a] + h;
                let up = self.value(&q);
                q[a] = p[a] - h;
                let down = self.value(&q);
                q[a] = p[a];
                (up - down) / (2.0 * h)
            })
            .collect()
    }

    /// `-sum_b dF/dp_b`, i.e. the rate of increase of `F` along `-(1,..,1)`.
    fn neg_divergence(&self, p: &[f64]) -> f64 {
        let h = fd_step(p.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let up: Vec<f64> = p.iter().map(|v| v + h).collect();
        let down: Vec<f64> = p.iter().map(|v| v - h).collect();
        -(self.value(&up) - self.value(&down)) / (2.0 * h)
    }

    /// Thresholds `p(K)` with `F(p) <= K => p_a >= p_a(K)`. When `upper` is
    /// given the other coordinates are restricted to `p_b <= upper_b`.
    fn lower_inverse(&self, k: f64, upper: Option<&[f64]>) -> LowerInverse {
        generic_lower_inverse(self, k, upper)
    }
}

/// Result of [`JunctionFunction::lower_inverse`].
#[derive(Debug, Clone, PartialEq)]
pub struct LowerInverse {
    pub thresholds: Vec<f64>,
    /// `false` when `{F <= K}` is empty; thresholds are then `+inf`.
    pub feasible: bool,
}

impl LowerInverse {
    fn infeasible(n: usize) -> Self {
        Self {
            thresholds: vec![f64::INFINITY; n],
            feasible: false,
        }
    }
}

const FAR_COORDINATE: f64 = 1e8;

fn generic_lower_inverse<F: JunctionFunction + ?Sized>(f: &F, k: f64, upper: Option<&[f64]>) -> LowerInverse {
    let n = f.num_branches();
    let mut thresholds = Vec::with_capacity(n);
    for a in 0..n {
        let base: Vec<f64> = match upper {
            Some(u) => u.to_vec(),
            None => vec![FAR_COORDINATE; n],
        };
        let at = |q: f64| {
            let mut p = base.clone();
            p[a] = q;
            f.value(&p) <= k
        };
        let start = upper.map_or(0.0, |u| u[a]);
        let threshold = if at(start) {
            let mut w = 1.0f64;
            let lo = loop {
                let q = start - w;
                if !at(q) {
                    break Some(q);
                }
                w *= 2.0;
                if w > 2f64.powi(60) {
                    break None;
                }
            };
            match lo {
                Some(lo) => bisect_switch(lo, start, at).1,
                None => f64::NEG_INFINITY,
            }
        } else {
            let mut w = 1.0f64;
            let hi = loop {
                let q = start + w;
                if at(q) {
                    break Some(q);
                }
                w *= 2.0;
                if w > 2f64.powi(60) {
                    break None;
                }
            };
            match hi {
                Some(hi) => bisect_switch(start, hi, at).1,
                None => return LowerInverse::infeasible(n),
            }
        };
        thresholds.push(threshold);
    }
    LowerInverse {
        thresholds,
        feasible: true,
    }
}

/// `F_A(p) = max(A, max_a H_a^-(p_a))`.
#[derive(Debug, Clone)]
pub struct FluxLimitedF {
    limiter: f64,
    hamiltonians: Vec<Hamiltonian>,
}

impl FluxLimitedF {
    /// `limiter` may be `-inf`.
    pub fn new(limiter: f64, hamiltonians: Vec<Hamiltonian>) -> Result<Self> {
        if hamiltonians.is_empty() {
            return Err(Error::InvalidArgument("flux-limited function needs at least one branch".into()));
        }
        if limiter.is_nan() || limiter == f64::INFINITY {
            return Err(Error::InvalidArgument(format!("invalid flux limiter {limiter}")));
        }
        Ok(Self { limiter, hamiltonians })
    }

    pub fn limiter(&self) -> f64 {
        self.limiter
    }

    pub fn hamiltonians(&self) -> &[Hamiltonian] {
        &self.hamiltonians
    }

    /// Effective limiter `max(A, A0)`: the infimum of `F_A`.
    pub fn effective_limiter(&self) -> f64 {
        self.limiter.max(compute_a0(&self.hamiltonians))
    }

    /// The same function seen through the generic interface, with
    /// finite-difference partials.
    pub fn as_general(&self) -> GeneralF {
        let me = self.clone();
        GeneralF::new(self.hamiltonians.len(), "flux_limited", move |p| me.value(p))
    }
}

impl JunctionFunction for FluxLimitedF {
    fn num_branches(&self) -> usize {
        self.hamiltonians.len()
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.hamiltonians
            .iter()
            .zip(p)
            .fold(self.limiter, |m, (h, &q)| m.max(h.minus(q)))
    }

    fn partials(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        let mut best = self.limiter;
        let mut arg = None;
        for (a, (h, &q)) in self.hamiltonians.iter().zip(p).enumerate() {
            let v = h.minus(q);
            if v > best {
                best = v;
                arg = Some(a);
            }
        }
        if let Some(a) = arg {
            out[a] = self.hamiltonians[a].minus_deriv(p[a]);
        }
        out
    }

    /// Largest one-sided rate among the pieces active at `p`.
    fn neg_divergence(&self, p: &[f64]) -> f64 {
        let v = self.value(p);
        let tol = TOL_F * (1.0 + v.abs());
        let mut rate = f64::NEG_INFINITY;
        if self.limiter >= v - tol {
            rate = 0.0;
        }
        for (h, &q) in self.hamiltonians.iter().zip(p) {
            if h.minus(q) >= v - tol {
                let d = if q < h.p0() { -h.deriv(q) } else { 0.0 };
                rate = rate.max(d);
            }
        }
        rate
    }

    fn lower_inverse(&self, k: f64, _upper: Option<&[f64]>) -> LowerInverse {
        if k < self.effective_limiter() {
            return LowerInverse::infeasible(self.hamiltonians.len());
        }
        LowerInverse {
            thresholds: self.hamiltonians.iter().map(|h| h.inverse(Side::Minus, k)).collect(),
            feasible: true,
        }
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A junction function given only by its values.
#[derive(Clone)]
pub struct GeneralF {
    n: usize,
    name: String,
    eval: Arc<ValueFn>,
}

impl fmt::Debug for GeneralF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralF").field("n", &self.n).field("name", &self.name).finish()
    }
}

impl GeneralF {
    pub fn new(n: usize, name: impl Into<String>, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            n,
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// `offset - sum_a w_a p_a` with positive weights.
    pub fn negative_sum(weights: Vec<f64>, offset: f64) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidArgument("negative_sum weights must be positive".into()));
        }
        let n = weights.len();
        Ok(Self::new(n, "negative_sum", move |p| {
            offset - weights.iter().zip(p).map(|(w, q)| w * q).sum::<f64>()
        }))
    }

    /// `offset + sum_a w_a exp(-p_a)`.
    pub fn exponential(weights: Vec<f64>, offset: f64) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidArgument("exponential weights must be positive".into()));
        }
        let n = weights.len();
        Ok(Self::new(n, "exponential", move |p| {
            offset + weights.iter().zip(p).map(|(w, q)| w * (-q).exp()).sum::<f64>()
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl JunctionFunction for GeneralF {
    fn num_branches(&self) -> usize {
        self.n
    }

    fn value(&self, p: &[f64]) -> f64 {
        (self.eval)(p)
    }
}

/// `max_a min H_a`.
pub fn compute_a0(hamiltonians: &[Hamiltonian]) -> f64 {
    hamiltonians
        .iter()
        .map(Hamiltonian::min_value)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn flux_limited_value(f: &FluxLimitedF, p: &[f64]) -> f64 {
    f.value(p)
}

/// `sup` of `-div F` over a box, by a 33-point-per-axis tensor grid and a
/// local refinement.
pub fn sup_neg_divergence(f: &dyn JunctionFunction, box_: &[(f64, f64)]) -> f64 {
    box_sup(|p| f.neg_divergence(p), box_, 33).0
}

/// How [`build_f_tilde`] treats a non-positive slope `C_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopePolicy {
    /// `C_a <= tol` is a hypothesis violation.
    Strict,
    /// Clamp `C_a` to zero, for functions that are only non-increasing.
    Weak,
}

/// `F~`: equal to `F` on the box `Q0`, extended linearly with slope `-C_a`
/// across each face and barycentrically elsewhere.
#[derive(Debug, Clone)]
pub struct ModifiedF {
    base: Arc<dyn JunctionFunction>,
    q0: Vec<(f64, f64)>,
    slopes: Vec<f64>,
}

impl ModifiedF {
    pub fn q0(&self) -> &[(f64, f64)] {
        &self.q0
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn base(&self) -> &Arc<dyn JunctionFunction> {
        &self.base
    }

    fn project(&self, p: &[f64]) -> Vec<f64> {
        p.iter().zip(&self.q0).map(|(&v, &(lo, hi))| v.clamp(lo, hi)).collect()
    }

    /// `F~` on the slab `D_a` where only coordinate `a` may leave its interval.
    fn on_slab(&self, a: usize, p: &[f64]) -> f64 {
        let proj = self.project(p);
        self.base.value(&proj) - self.slopes[a] * (p[a] - proj[a])
    }
}

impl JunctionFunction for ModifiedF {
    fn num_branches(&self) -> usize {
        self.q0.len()
    }

    fn value(&self, p: &[f64]) -> f64 {
        let proj = self.project(p);
        let excess: Vec<f64> = p.iter().zip(&proj).map(|(v, c)| v - c).collect();
        let total: f64 = excess.iter().map(|e| e.abs()).sum();
        if total == 0.0 {
            return self.base.value(p);
        }
        let mut acc = 0.0;
        let mut corner = proj.clone();
        for (a, &e) in excess.iter().enumerate() {
            if e == 0.0 {
                continue;
            }
            let weight = e.abs() / total;
            corner[a] = proj[a] + e / weight;
            acc += weight * self.on_slab(a, &corner);
            corner[a] = proj[a];
        }
        acc
    }
}

/// Builds `F~` from `f` and the box `q0`. `C_a` is the minimum over `q0` of
/// `-dF/dp_a`.
pub fn build_f_tilde(f: Arc<dyn JunctionFunction>, q0: &[(f64, f64)], policy: SlopePolicy) -> Result<ModifiedF> {
    let n = f.num_branches();
    if q0.len() != n {
        return Err(Error::InvalidArgument(format!(
            "box has {} intervals for {} branches",
            q0.len(),
            n
        )));
    }
    if q0.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::InvalidArgument("box intervals must be finite with lo <= hi".into()));
    }
    let mut slopes = Vec::with_capacity(n);
    for a in 0..n {
        let (max_partial, _) = box_sup(|p| f.partials(p)[a], q0, 17);
        let c = -max_partial;
        if c <= TOL_F {
            match policy {
                SlopePolicy::Strict => {
                    return Err(Error::HypothesisViolation(format!(
                        "junction function is not strictly decreasing in coordinate {} on the box (C = {c})",
                        a + 1
                    )))
                }
                SlopePolicy::Weak => slopes.push(c.max(0.0)),
            }
        } else {
            slopes.push(c);
        }
    }
    Ok(ModifiedF {
        base: f,
        q0: q0.to_vec(),
        slopes,
    })
}

/// Outcome of [`validate_f`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FReport {
    /// Per coordinate, the largest sampled forward increment of `F`.
    pub monotonicity_margin: Vec<f64>,
    pub strictly_decreasing: bool,
    pub non_increasing: bool,
    pub coercive: bool,
}

/// Sampled check of monotonicity and of coercivity along `p = -t(1,..,1)`.
pub fn validate_f(f: &dyn JunctionFunction, box_: &[(f64, f64)], samples: usize) -> Result<FReport> {
    if samples < 3 {
        return Err(Error::InvalidArgument("validation needs at least 3 samples per axis".into()));
    }
    let n = f.num_branches();
    let mut margin = vec![f64::NEG_INFINITY; n];
    let mut q = vec![0.0; n];
    crate::numerics::for_each_box_point(box_, samples, |p| {
        let base = f.value(p);
        for a in 0..n {
            let step = (box_[a].1 - box_[a].0) / (samples - 1) as f64;
            q.copy_from_slice(p);
            q[a] += step.max(1e-6);
            margin[a] = margin[a].max(f.value(&q) - base);
        }
    });
    let tol = TOL_F;
    let ray: Vec<f64> = (0..=7)
        .map(|k| {
            let t = if k == 0 { 0.0 } else { 2f64.powi(k - 1) };
            f.value(&vec![-t; n])
        })
        .collect();
    let coercive = ray.windows(2).skip(1).all(|w| w[1] > w[0]) && ray[7] > ray[0] + 1.0;
    Ok(FReport {
        strictly_decreasing: margin.iter().all(|&m| m < 0.0),
        non_increasing: margin.iter().all(|&m| m <= tol),
        monotonicity_margin: margin,
        coercive,
    })
}
