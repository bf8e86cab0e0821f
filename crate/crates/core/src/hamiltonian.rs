//! Quasi-convex coercive Hamiltonians: monotone envelopes, argmin and the
//! generalized inverses of the envelopes.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{bisect_switch, central_difference, golden_section_min, sampled_sup, TOL_F, TOL_X};

/// Which monotone piece of a Hamiltonian an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Non-increasing part, left of the argmin.
    Minus,
    /// Non-decreasing part, right of the argmin.
    Plus,
}

/// A scalar Hamiltonian. Only `eval` is required; the other methods let
/// closed-form families skip numerical differentiation and root finding.
pub trait HamiltonianFn: Send + Sync + fmt::Debug {
    fn eval(&self, p: f64) -> f64;

    fn deriv(&self, p: f64) -> f64 {
        central_difference(|q| self.eval(q), p)
    }

    fn second_deriv(&self, p: f64) -> f64 {
        central_difference(|q| self.deriv(q), p)
    }

    /// Exact minimizer, when known.
    fn argmin_hint(&self) -> Option<f64> {
        None
    }

    /// `min H''` for smooth uniformly convex Hamiltonians.
    fn convexity_modulus(&self) -> Option<f64> {
        None
    }

    /// Closed-form inverse of the envelope on `side` at a level that is
    /// already clamped to be at least `min H`.
    fn inverse(&self, _side: Side, _level: f64) -> Option<f64> {
        None
    }
}

/// `scale * (p - center)^2 + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub center: f64,
    pub scale: f64,
    pub offset: f64,
}

impl HamiltonianFn for Quadratic {
    fn eval(&self, p: f64) -> f64 {
        let q = p - self.center;
        self.scale * q * q + self.offset
    }
    fn deriv(&self, p: f64) -> f64 {
        2.0 * self.scale * (p - self.center)
    }
    fn second_deriv(&self, _p: f64) -> f64 {
        2.0 * self.scale
    }
    fn argmin_hint(&self) -> Option<f64> {
        Some(self.center)
    }
    fn convexity_modulus(&self) -> Option<f64> {
        Some(2.0 * self.scale)
    }
    fn inverse(&self, side: Side, level: f64) -> Option<f64> {
        let r = ((level - self.offset) / self.scale).max(0.0).sqrt();
        Some(match side {
            Side::Plus => self.center + r,
            Side::Minus => self.center - r,
        })
    }
}

/// `scale * |p - center| + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsValue {
    pub center: f64,
    pub scale: f64,
    pub offset: f64,
}

impl HamiltonianFn for AbsValue {
    fn eval(&self, p: f64) -> f64 {
        self.scale * (p - self.center).abs() + self.offset
    }
    fn deriv(&self, p: f64) -> f64 {
        if p > self.center {
            self.scale
        } else if p < self.center {
            -self.scale
        } else {
            0.0
        }
    }
    fn second_deriv(&self, _p: f64) -> f64 {
        0.0
    }
    fn argmin_hint(&self) -> Option<f64> {
        Some(self.center)
    }
    fn inverse(&self, side: Side, level: f64) -> Option<f64> {
        let r = ((level - self.offset) / self.scale).max(0.0);
        Some(match side {
            Side::Plus => self.center + r,
            Side::Minus => self.center - r,
        })
    }
}

/// `max(-2p, p^2)`: quasi-convex, linear on `[-2, 0]`, quadratic elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Asymmetric;

impl HamiltonianFn for Asymmetric {
    fn eval(&self, p: f64) -> f64 {
        (-2.0 * p).max(p * p)
    }
    fn deriv(&self, p: f64) -> f64 {
        if !(-2.0..0.0).contains(&p) {
            2.0 * p
        } else {
            -2.0
        }
    }
    fn second_deriv(&self, p: f64) -> f64 {
        if !(-2.0..0.0).contains(&p) {
            2.0
        } else {
            0.0
        }
    }
    fn argmin_hint(&self) -> Option<f64> {
        Some(0.0)
    }
    fn inverse(&self, side: Side, level: f64) -> Option<f64> {
        let level = level.max(0.0);
        Some(match side {
            Side::Plus => level.sqrt(),
            Side::Minus if level <= 4.0 => -0.5 * level,
            Side::Minus => -level.sqrt(),
        })
    }
}

/// `p -> H(-p)`.
#[derive(Debug, Clone)]
struct Reflected(Arc<dyn HamiltonianFn>);

impl HamiltonianFn for Reflected {
    fn eval(&self, p: f64) -> f64 {
        self.0.eval(-p)
    }
    fn deriv(&self, p: f64) -> f64 {
        -self.0.deriv(-p)
    }
    fn second_deriv(&self, p: f64) -> f64 {
        self.0.second_deriv(-p)
    }
    fn argmin_hint(&self) -> Option<f64> {
        self.0.argmin_hint().map(|p| -p)
    }
    fn convexity_modulus(&self) -> Option<f64> {
        self.0.convexity_modulus()
    }
    fn inverse(&self, side: Side, level: f64) -> Option<f64> {
        let other = match side {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        };
        self.0.inverse(other, level).map(|p| -p)
    }
}

/// `p -> H(shift + p)`.
#[derive(Debug, Clone)]
struct Shifted {
    base: Arc<dyn HamiltonianFn>,
    shift: f64,
}

impl HamiltonianFn for Shifted {
    fn eval(&self, p: f64) -> f64 {
        self.base.eval(self.shift + p)
    }
    fn deriv(&self, p: f64) -> f64 {
        self.base.deriv(self.shift + p)
    }
    fn second_deriv(&self, p: f64) -> f64 {
        self.base.second_deriv(self.shift + p)
    }
    fn argmin_hint(&self) -> Option<f64> {
        self.base.argmin_hint().map(|p| p - self.shift)
    }
    fn convexity_modulus(&self) -> Option<f64> {
        self.base.convexity_modulus()
    }
    fn inverse(&self, side: Side, level: f64) -> Option<f64> {
        self.base.inverse(side, level).map(|p| p - self.shift)
    }
}

/// A quasi-convex Hamiltonian together with its argmin `p0` and minimum value.
#[derive(Clone)]
pub struct Hamiltonian {
    func: Arc<dyn HamiltonianFn>,
    p0: f64,
    min_value: f64,
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hamiltonian")
            .field("func", &self.func)
            .field("p0", &self.p0)
            .field("min_value", &self.min_value)
            .finish()
    }
}

impl Hamiltonian {
    /// Wraps `func`, locating its minimizer by golden-section search on a
    /// bracket grown until the minimum is interior.
    pub fn new(func: impl HamiltonianFn + 'static) -> Result<Self> {
        Self::from_arc(Arc::new(func))
    }

    pub fn from_arc(func: Arc<dyn HamiltonianFn>) -> Result<Self> {
        let p0 = match func.argmin_hint() {
            Some(p0) => p0,
            None => {
                let mut half = 1.0f64;
                loop {
                    let (x, _) = golden_section_min(|p| func.eval(p), -half, half, TOL_X);
                    if (x.abs() - half).abs() > 1e-3 * half {
                        break argmin(func.as_ref(), (-half, half))?;
                    }
                    half *= 2.0;
                    if half > 2f64.powi(30) {
                        return Err(Error::Validation("Hamiltonian is not coercive: no interior minimum found".into()));
                    }
                }
            }
        };
        let min_value = func.eval(p0);
        if !min_value.is_finite() {
            return Err(Error::Data(format!("Hamiltonian is not finite at its argmin ({min_value})")));
        }
        Ok(Self { func, p0, min_value })
    }

    pub fn quadratic(center: f64, scale: f64, offset: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument(format!("quadratic scale must be positive, got {scale}")));
        }
        Self::new(Quadratic { center, scale, offset })
    }

    pub fn abs_value(center: f64, scale: f64, offset: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument(format!("absolute-value scale must be positive, got {scale}")));
        }
        Self::new(AbsValue { center, scale, offset })
    }

    pub fn asymmetric() -> Self {
        Self::new(Asymmetric).expect("closed-form argmin")
    }

    pub fn function(&self) -> &Arc<dyn HamiltonianFn> {
        &self.func
    }

    #[inline]
    pub fn eval(&self, p: f64) -> f64 {
        self.func.eval(p)
    }

    #[inline]
    pub fn deriv(&self, p: f64) -> f64 {
        self.func.deriv(p)
    }

    pub fn second_deriv(&self, p: f64) -> f64 {
        self.func.second_deriv(p)
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn convexity_modulus(&self) -> Option<f64> {
        self.func.convexity_modulus()
    }

    /// Non-increasing envelope `H^-`.
    #[inline]
    pub fn minus(&self, p: f64) -> f64 {
        if p <= self.p0 {
            self.func.eval(p)
        } else {
            self.min_value
        }
    }

    /// Non-decreasing envelope `H^+`.
    #[inline]
    pub fn plus(&self, p: f64) -> f64 {
        if p >= self.p0 {
            self.func.eval(p)
        } else {
            self.min_value
        }
    }

    /// Derivative of `H^-`.
    pub fn minus_deriv(&self, p: f64) -> f64 {
        if p < self.p0 {
            self.func.deriv(p)
        } else {
            0.0
        }
    }

    /// Derivative of `H^+`.
    pub fn plus_deriv(&self, p: f64) -> f64 {
        if p > self.p0 {
            self.func.deriv(p)
        } else {
            0.0
        }
    }

    pub fn envelopes(&self) -> EnvelopePair {
        EnvelopePair { h: self.clone() }
    }

    /// Generalized inverse of the envelope on `side`:
    /// `sup {p : H^+(p) = max(a, min H)}` or `inf {p : H^-(p) = max(a, min H)}`.
    /// Levels below `min H` are clamped; `a = +inf` maps to `+inf` / `-inf`.
    pub fn inverse(&self, side: Side, a: f64) -> f64 {
        if a == f64::INFINITY {
            return match side {
                Side::Plus => f64::INFINITY,
                Side::Minus => f64::NEG_INFINITY,
            };
        }
        let level = a.max(self.min_value);
        if let Some(p) = self.func.inverse(side, level) {
            return p;
        }
        self.inverse_by_bisection(side, level)
    }

    /// Bisection route for [`Hamiltonian::inverse`], exposed so that closed
    /// forms can be checked against it.
    pub fn inverse_by_bisection(&self, side: Side, level: f64) -> f64 {
        let level = level.max(self.min_value);
        let dir = match side {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        };
        let mut width = 1.0f64;
        let far = loop {
            let p = self.p0 + dir * width;
            if self.func.eval(p) > level {
                break p;
            }
            width *= 2.0;
            if width > 2f64.powi(60) {
                return dir * f64::INFINITY;
            }
        };
        match side {
            Side::Plus => bisect_switch(self.p0, far, |p| self.func.eval(p) > level).0,
            Side::Minus => bisect_switch(far, self.p0, |p| self.func.eval(p) <= level).1,
        }
    }

    /// `sup |H'|` over `[lo, hi]` by 129-point sampling plus refinement.
    pub fn sup_abs_deriv(&self, lo: f64, hi: f64) -> f64 {
        sampled_sup(|p| self.deriv(p).abs(), lo.min(hi), lo.max(hi), 129)
    }

    /// `sup |H|` over `[lo, hi]`.
    pub fn sup_abs(&self, lo: f64, hi: f64) -> f64 {
        sampled_sup(|p| self.eval(p).abs(), lo.min(hi), lo.max(hi), 129)
    }

    /// `H(p0 + p)` together with the shift `p0`, so that the returned
    /// Hamiltonian attains its minimum at zero.
    pub fn tilt_normalize(&self) -> (Hamiltonian, f64) {
        let shift = self.p0;
        if shift == 0.0 {
            return (self.clone(), 0.0);
        }
        let func: Arc<dyn HamiltonianFn> = Arc::new(Shifted {
            base: self.func.clone(),
            shift,
        });
        (
            Hamiltonian {
                func,
                p0: 0.0,
                min_value: self.min_value,
            },
            shift,
        )
    }

    /// `p -> H(-p)`, used for the second half of a glued line.
    pub fn reflected(&self) -> Hamiltonian {
        Hamiltonian {
            func: Arc::new(Reflected(self.func.clone())),
            p0: -self.p0,
            min_value: self.min_value,
        }
    }
}

/// Monotone envelopes of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct EnvelopePair {
    h: Hamiltonian,
}

impl EnvelopePair {
    pub fn minus(&self, p: f64) -> f64 {
        self.h.minus(p)
    }

    pub fn plus(&self, p: f64) -> f64 {
        self.h.plus(p)
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }
}

/// Golden-section argmin on `bracket` after a brute-force unimodality check.
pub fn argmin(func: &dyn HamiltonianFn, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    let samples: Vec<f64> = (0..=256).map(|k| func.eval(lo + (hi - lo) * k as f64 / 256.0)).collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("Hamiltonian is not finite on the argmin bracket".into()));
    }
    if !is_unimodal(&samples) {
        return Err(Error::Validation(format!(
            "Hamiltonian is not unimodal on [{lo}, {hi}]"
        )));
    }
    let x = golden_section_min(|p| func.eval(p), lo, hi, TOL_X).0;
    // values are flat to rounding near a smooth minimum; sharpen on the slope sign
    let d = 1e-5 * x.abs().max(1.0);
    let (a, b) = ((x - d).max(lo), (x + d).min(hi));
    if func.deriv(a) <= 0.0 && func.deriv(b) > 0.0 {
        let (l, r) = bisect_switch(a, b, |p| func.deriv(p) > 0.0);
        let m = 0.5 * (l + r);
        if func.eval(m) <= func.eval(x) {
            return Ok(m);
        }
    }
    Ok(x)
}

fn sign_changes(samples: &[f64]) -> (usize, Option<f64>) {
    let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut last: Option<f64> = None;
    let mut first: Option<f64> = None;
    let mut changes = 0;
    for w in samples.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= TOL_F * scale {
            continue;
        }
        let s = d.signum();
        if first.is_none() {
            first = Some(s);
        }
        if let Some(prev) = last {
            if prev != s {
                changes += 1;
            }
        }
        last = Some(s);
    }
    (changes, first)
}

fn is_unimodal(samples: &[f64]) -> bool {
    let (changes, first) = sign_changes(samples);
    changes == 0 || (changes == 1 && first == Some(-1.0))
}

/// Outcome of [`validate_hamiltonian`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HamiltonianReport {
    pub lipschitz_estimate: f64,
    pub lipschitz_ok: bool,
    pub coercive_left: bool,
    pub coercive_right: bool,
    pub sign_changes: usize,
    pub unimodal: bool,
}

impl HamiltonianReport {
    pub fn coercive(&self) -> bool {
        self.coercive_left && self.coercive_right
    }

    pub fn passed(&self) -> bool {
        self.lipschitz_ok && self.coercive() && self.unimodal
    }
}

/// Sampled check of regularity, coercivity and quasi-convexity on `interval`.
/// `lipschitz_bound`, if given, is compared against the sampled slopes.
pub fn validate_hamiltonian(
    h: &dyn Fn(f64) -> f64,
    interval: (f64, f64),
    samples: usize,
    lipschitz_bound: Option<f64>,
) -> Result<HamiltonianReport> {
    if samples < 3 {
        return Err(Error::InvalidArgument("validation needs at least 3 samples".into()));
    }
    let (lo, hi) = (interval.0.min(interval.1), interval.0.max(interval.1));
    let step = (hi - lo) / (samples - 1) as f64;
    let values: Vec<f64> = (0..samples).map(|k| h(lo + k as f64 * step)).collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!(
            "Hamiltonian is not finite at p = {}",
            lo + k as f64 * step
        )));
    }
    let lipschitz_estimate = values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / step)
        .fold(0.0, f64::max);
    let lipschitz_ok = match lipschitz_bound {
        Some(bound) => lipschitz_estimate <= bound * (1.0 + 1e-9) + TOL_F,
        None => lipschitz_estimate.is_finite(),
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let n = values.len();
    let coercive_left = values[0] > values[1] && values[0] > min;
    let coercive_right = values[n - 1] > values[n - 2] && values[n - 1] > min;
    let (changes, first) = sign_changes(&values);
    Ok(HamiltonianReport {
        lipschitz_estimate,
        lipschitz_ok,
        coercive_left,
        coercive_right,
        sign_changes: changes,
        unimodal: changes == 0 || (changes == 1 && first == Some(-1.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p2() -> Hamiltonian {
        Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap()
    }

    struct Opaque<F: Fn(f64) -> f64 + Send + Sync>(F);
    impl<F: Fn(f64) -> f64 + Send + Sync> HamiltonianFn for Opaque<F> {
        fn eval(&self, p: f64) -> f64 {
            (self.0)(p)
        }
    }
    impl<F: Fn(f64) -> f64 + Send + Sync> fmt::Debug for Opaque<F> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("Opaque")
        }
    }

    #[test]
    fn validation_examples() {
        let ok = validate_hamiltonian(&|p| p * p, (-10.0, 10.0), 201, Some(20.0)).unwrap();
        assert!(ok.passed());

        let lin = validate_hamiltonian(&|p| -p, (-10.0, 10.0), 201, None).unwrap();
        assert!(!lin.coercive());
        assert!(!lin.passed());

        // sin has extrema at pi/2 + k*pi; count those strictly inside (-10, 10)
        let expected = (-10i32..10)
            .map(|k| std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI)
            .filter(|x| x.abs() < 10.0)
            .count();
        let s = validate_hamiltonian(&|p: f64| p.sin(), (-10.0, 10.0), 2001, None).unwrap();
        assert!(!s.unimodal);
        assert_eq!(s.sign_changes, expected);
    }

    #[test]
    fn validation_rejects_non_finite() {
        let r = validate_hamiltonian(&|p| if p > 0.0 { f64::NAN } else { p * p }, (-1.0, 1.0), 11, None);
        assert!(matches!(r, Err(Error::Data(_))));
        assert!(validate_hamiltonian(&|p| p, (0.0, 1.0), 2, None).is_err());
    }

    #[test]
    fn argmin_examples() {
        let sq = Opaque(|p: f64| p * p);
        assert!(argmin(&sq, (-5.0, 5.0)).unwrap().abs() < 1e-9);
        let shifted = Opaque(|p: f64| (p - 1.0) * (p - 1.0));
        assert!((argmin(&shifted, (-5.0, 5.0)).unwrap() - 1.0).abs() < 1e-9);
        let v = Opaque(|p: f64| (p + 2.0).abs());
        assert!((argmin(&v, (-5.0, 5.0)).unwrap() + 2.0).abs() < 1e-9);
        let wavy = Opaque(|p: f64| p.sin());
        assert!(matches!(argmin(&wavy, (-10.0, 10.0)), Err(Error::Validation(_))));
    }

    #[test]
    fn constructor_finds_argmin_without_hint() {
        let h = Hamiltonian::new(Opaque(|p: f64| (p - 3.5) * (p - 3.5) + 2.0)).unwrap();
        assert!((h.p0() - 3.5).abs() < 1e-9);
        assert!((h.min_value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn envelope_examples() {
        let h = p2();
        assert_eq!(h.minus(-2.0), 4.0);
        assert_eq!(h.minus(1.0), 0.0);
        assert_eq!(h.plus(3.0), 9.0);
        assert_eq!(h.plus(-1.0), 0.0);
        let g = Hamiltonian::quadratic(1.0, 1.0, 0.0).unwrap();
        assert_eq!(g.minus(0.0), 1.0);
        assert_eq!(g.plus(0.0), 0.0);
    }

    #[test]
    fn inverse_examples() {
        let h = p2();
        assert_eq!(h.inverse(Side::Plus, 4.0), 2.0);
        assert_eq!(h.inverse(Side::Minus, 4.0), -2.0);
        assert_eq!(h.inverse(Side::Plus, -1.0), 0.0);
        assert_eq!(h.inverse(Side::Plus, f64::INFINITY), f64::INFINITY);
        assert_eq!(h.inverse(Side::Minus, f64::INFINITY), f64::NEG_INFINITY);
    }

    #[test]
    fn bisection_inverse_agrees_with_closed_forms() {
        for h in [
            p2(),
            Hamiltonian::quadratic(0.5, 2.0, -1.0).unwrap(),
            Hamiltonian::abs_value(-2.0, 1.0, 0.0).unwrap(),
            Hamiltonian::asymmetric(),
            p2().reflected(),
            Hamiltonian::quadratic(1.0, 1.0, 0.0).unwrap().tilt_normalize().0,
        ] {
            for a in [0.1, 1.0, 3.0, 4.0, 9.0, 25.0] {
                for side in [Side::Plus, Side::Minus] {
                    let closed = h.inverse(side, a);
                    let bis = h.inverse_by_bisection(side, a);
                    assert!((closed - bis).abs() < 1e-12 * (1.0 + closed.abs()), "{h:?} {side:?} {a}");
                }
            }
        }
    }

    #[test]
    fn flat_minimum_inverse_returns_edge_of_flat_set() {
        let flat = Hamiltonian::new(Opaque(|p: f64| (p.abs() - 1.0).max(0.0))).unwrap();
        assert!((flat.inverse(Side::Plus, 0.0) - 1.0).abs() < 1e-12);
        assert!((flat.inverse(Side::Minus, 0.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tilt_examples() {
        let (t, s) = Hamiltonian::quadratic(1.0, 1.0, 0.0).unwrap().tilt_normalize();
        assert_eq!(s, 1.0);
        assert_eq!(t.p0(), 0.0);
        assert_eq!(t.eval(2.0), 4.0);

        let (t, s) = p2().tilt_normalize();
        assert_eq!(s, 0.0);
        assert_eq!(t.eval(3.0), 9.0);

        let (t, s) = Hamiltonian::abs_value(-2.0, 1.0, 0.0).unwrap().tilt_normalize();
        assert_eq!(s, -2.0);
        assert_eq!(t.eval(-3.0), 3.0);
        assert_eq!(t.min_value(), 0.0);
    }

    #[test]
    fn asymmetric_is_quasi_convex() {
        let h = Hamiltonian::asymmetric();
        let r = validate_hamiltonian(&|p| h.eval(p), (-10.0, 10.0), 401, None).unwrap();
        assert!(r.passed());
        assert_eq!(h.p0(), 0.0);
    }

    proptest! {
        #[test]
        fn inverse_round_trips(a in -5.0f64..50.0, c in -3.0f64..3.0, s in 0.2f64..4.0, m in -2.0f64..2.0) {
            for h in [
                Hamiltonian::quadratic(c, s, m).unwrap(),
                Hamiltonian::abs_value(c, s, m).unwrap(),
                Hamiltonian::asymmetric(),
            ] {
                let target = a.max(h.min_value());
                let pp = h.inverse(Side::Plus, a);
                let pm = h.inverse(Side::Minus, a);
                prop_assert!((h.plus(pp) - target).abs() <= TOL_F * (1.0 + target.abs()));
                prop_assert!((h.minus(pm) - target).abs() <= TOL_F * (1.0 + target.abs()));
                // monotone in the level
                prop_assert!(h.inverse(Side::Plus, a + 0.5) >= pp);
                prop_assert!(h.inverse(Side::Minus, a + 0.5) <= pm);
            }
        }

        #[test]
        fn envelopes_reconstruct(p in -20.0f64..20.0, c in -3.0f64..3.0) {
            for h in [Hamiltonian::quadratic(c, 1.0, 0.5).unwrap(), Hamiltonian::asymmetric()] {
                prop_assert!((h.minus(p).max(h.plus(p)) - h.eval(p)).abs() <= TOL_F);
                prop_assert!((h.minus(p).min(h.plus(p)) - h.min_value()).abs() <= TOL_F);
            }
        }

        #[test]
        fn tilt_commutes_with_inverse(a in 0.0f64..30.0, c in -4.0f64..4.0) {
            let h = Hamiltonian::quadratic(c, 1.5, 0.0).unwrap();
            let (t, shift) = h.tilt_normalize();
            for side in [Side::Plus, Side::Minus] {
                prop_assert!((t.inverse(side, a) - (h.inverse(side, a) - shift)).abs() < 1e-12);
                prop_assert!((t.inverse_by_bisection(side, a) - (h.inverse(side, a) - shift)).abs() < 1e-9);
            }
        }
    }
}
