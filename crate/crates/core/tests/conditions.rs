use std::sync::Arc;

use hj_junction::conditions::{
    build_f_tilde, compute_a0, validate_f, FluxLimitedF, GeneralF, JunctionFunction, SlopePolicy,
};
use hj_junction::Hamiltonian;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hams() -> Vec<Hamiltonian> {
    vec![
        Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap(),
        Hamiltonian::quadratic(0.5, 2.0, 0.5).unwrap(),
        Hamiltonian::asymmetric(),
    ]
}

proptest! {
    #[test]
    fn flux_limited_is_non_increasing(a in -1.0f64..3.0, p in prop::array::uniform3(-3.0f64..3.0), k in 0..3usize, d in 0.0f64..2.0) {
        let f = FluxLimitedF::new(a, hams()).unwrap();
        let mut q = p.to_vec();
        q[k] += d;
        prop_assert!(f.value(&q) <= f.value(&p) + 1e-12);
        prop_assert!(f.value(&p) >= a.max(compute_a0(&hams())) - 1e-12);
    }

    #[test]
    fn exact_partials_match_differences(a in -1.0f64..3.0, p in prop::array::uniform3(-3.0f64..3.0)) {
        let f = FluxLimitedF::new(a, hams()).unwrap();
        let general = f.as_general();
        let exact = f.partials(&p);
        let fd = general.partials(&p);
        // away from switching surfaces the two agree
        let kinks = (0..3).any(|k| (exact[k] - fd[k]).abs() > 1e-4);
        if !kinks {
            prop_assert!(f.neg_divergence(&p) >= -1e-12);
        }
    }

    #[test]
    fn f_tilde_agrees_on_the_box_and_stays_monotone(p in prop::array::uniform2(-4.0f64..4.0), k in 0..2usize, d in 0.0f64..1.0) {
        let f: Arc<dyn JunctionFunction> = Arc::new(GeneralF::exponential(vec![1.0, 0.5], 0.0).unwrap());
        let q0 = [(-1.0, 1.0), (0.0, 2.0)];
        let ft = build_f_tilde(f.clone(), &q0, SlopePolicy::Strict).unwrap();
        let inside = p.iter().zip(&q0).all(|(v, (lo, hi))| v >= lo && v <= hi);
        if inside {
            prop_assert_eq!(ft.value(&p), f.value(&p));
        }
        let mut q = p.to_vec();
        q[k] += d;
        prop_assert!(ft.value(&q) <= ft.value(&p) + 1e-12);
    }
}

/// Sampled at `10^4` points below `upper`: `F(p) <= K` forces `p >= p(K)`.
/// For `F_A` the orthant above the thresholds lies in `{F <= K}` as well.
#[test]
fn lower_inverse_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let flux = FluxLimitedF::new(0.7, hams()).unwrap();
    let custom = GeneralF::exponential(vec![1.0, 2.0, 0.5], 0.0).unwrap();
    let upper = [2.0, 2.0, 2.0];
    let mut hits = 0;
    for (f, exact) in [(&flux as &dyn JunctionFunction, true), (&custom, false)] {
        for _ in 0..50 {
            let k = rng.gen_range(1.0..6.0);
            let inv = f.lower_inverse(k, Some(&upper));
            assert!(inv.feasible, "level {k} should be attainable");
            for _ in 0..100 {
                let p: Vec<f64> = inv.thresholds.iter().zip(&upper).map(|(&t, &u)| rng.gen_range(t - 1.0..=u)).collect();
                let above = p.iter().zip(&inv.thresholds).all(|(v, t)| v + 1e-9 * (1.0 + t.abs()) >= *t);
                if f.value(&p) <= k {
                    hits += 1;
                    assert!(above, "F({p:?}) <= {k} below thresholds {:?}", inv.thresholds);
                }
                if exact && above {
                    assert!(f.value(&p) <= k + 1e-8 * (1.0 + k));
                }
            }
        }
    }
    assert!(hits > 500, "too few samples in the sublevel set: {hits}");
}

#[test]
fn lower_inverse_reports_infeasible_levels() {
    let f = FluxLimitedF::new(1.0, hams()).unwrap();
    assert!(!f.lower_inverse(0.5, None).feasible);
}

#[test]
fn general_functions_validate() {
    let f = GeneralF::negative_sum(vec![1.0, 2.0], 0.0).unwrap();
    let rep = validate_f(&f, &[(-2.0, 2.0), (-2.0, 2.0)], 9).unwrap();
    assert!(rep.strictly_decreasing && rep.non_increasing && rep.coercive);
    assert!(GeneralF::negative_sum(vec![1.0, -1.0], 0.0).is_err());
}

#[test]
fn strict_policy_rejects_flat_junction_functions() {
    let f: Arc<dyn JunctionFunction> = Arc::new(FluxLimitedF::new(5.0, hams()).unwrap());
    let q0 = [(-1.0, 1.0); 3];
    assert!(build_f_tilde(f.clone(), &q0, SlopePolicy::Strict).is_err());
    let weak = build_f_tilde(f.clone(), &q0, SlopePolicy::Weak).unwrap();
    assert_eq!(weak.value(&[0.0, 0.0, 0.0]), 5.0);
}
