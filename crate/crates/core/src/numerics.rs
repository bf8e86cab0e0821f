//! Scalar root finding, golden-section search and sampled suprema shared by
//! the rest of the crate.

/// Argument tolerance for roots and minimizers.
pub const TOL_X: f64 = 1e-10;
/// Tolerance on function values.
pub const TOL_F: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Step used for central finite differences around `p`.
pub fn fd_step(p: f64) -> f64 {
    1e-6 * p.abs().max(1.0)
}

pub fn central_difference(f: impl Fn(f64) -> f64, p: f64) -> f64 {
    let h = fd_step(p);
    (f(p + h) - f(p - h)) / (2.0 * h)
}

/// Locates the switching point of a monotone predicate.
///
/// Requires `pred(lo) == false` and `pred(hi) == true`. Bisects until the
/// bracket cannot shrink any further in floating point, so the result is as
/// sharp as the predicate allows. Returns the final `(lo, hi)` bracket.
pub fn bisect_switch(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    // endpoints are candidates too: the minimizer may sit on the boundary
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Supremum of `f` over `[lo, hi]` by uniform sampling followed by a
/// golden-section refinement around the best sample.
pub fn sampled_sup(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> f64 {
    if !(hi > lo) {
        return f(lo);
    }
    let n = samples.max(2);
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..n {
        let x = if k + 1 == n { hi } else { lo + k as f64 * h };
        let v = f(x);
        if v > best.1 || v.is_nan() {
            best = (k, v);
        }
    }
    if best.1.is_nan() {
        return f64::NAN;
    }
    let k = best.0;
    let a = lo + k.saturating_sub(1) as f64 * h;
    let b = (lo + (k + 1) as f64 * h).min(hi);
    let (_, neg) = golden_section_min(|x| -f(x), a, b, TOL_X * (1.0 + (b - a).abs()));
    best.1.max(-neg)
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Uniform tensor grid of `per_axis` points on each interval of a box,
/// visited in lexicographic order.
pub fn for_each_box_point(box_: &[(f64, f64)], per_axis: usize, mut visit: impl FnMut(&[f64])) {
    let n = box_.len();
    let per_axis = per_axis.max(1);
    let coord = |axis: usize, k: usize| -> f64 {
        let (lo, hi) = box_[axis];
        if per_axis == 1 || hi <= lo {
            if per_axis == 1 {
                0.5 * (lo + hi)
            } else {
                lo
            }
        } else if k + 1 == per_axis {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (per_axis - 1) as f64
        }
    };
    let mut idx = vec![0usize; n];
    let mut p: Vec<f64> = (0..n).map(|a| coord(a, 0)).collect();
    loop {
        visit(&p);
        let mut axis = 0;
        loop {
            if axis == n {
                return;
            }
            idx[axis] += 1;
            if idx[axis] < per_axis {
                p[axis] = coord(axis, idx[axis]);
                break;
            }
            idx[axis] = 0;
            p[axis] = coord(axis, 0);
            axis += 1;
        }
    }
}

/// Maximizes `f` over a box: dense tensor sampling, then a compass search
/// started from the best sample. Returns the best value and its location.
pub fn box_sup(f: impl Fn(&[f64]) -> f64, box_: &[(f64, f64)], per_axis: usize) -> (f64, Vec<f64>) {
    let n = box_.len();
    // keep the tensor grid below a few hundred thousand evaluations
    let mut per_axis = per_axis.max(2);
    while n > 0 && (per_axis as f64).powi(n as i32) > 3.0e5 && per_axis > 3 {
        per_axis -= 1;
    }
    let mut best_val = f64::NEG_INFINITY;
    let mut best_pt: Vec<f64> = box_.iter().map(|&(lo, _)| lo).collect();
    for_each_box_point(box_, per_axis, |p| {
        let v = f(p);
        if v > best_val {
            best_val = v;
            best_pt.copy_from_slice(p);
        }
    });
    if n == 0 {
        return (best_val, best_pt);
    }
    let mut steps: Vec<f64> = box_
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (per_axis - 1) as f64)
        .collect();
    let mut trial = best_pt.clone();
    for _ in 0..60 {
        let mut improved = false;
        for axis in 0..n {
            for dir in [-1.0, 1.0] {
                let (lo, hi) = box_[axis];
                trial.copy_from_slice(&best_pt);
                trial[axis] = (best_pt[axis] + dir * steps[axis]).clamp(lo, hi);
                let v = f(&trial);
                if v > best_val {
                    best_val = v;
                    best_pt.copy_from_slice(&trial);
                    improved = true;
                }
            }
        }
        if !improved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
            if steps.iter().all(|&s| s < TOL_X) {
                break;
            }
        }
    }
    (best_val, best_pt)
}
