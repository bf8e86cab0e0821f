use std::sync::Arc;

use hj_junction::conditions::{FluxLimitedF, JunctionFunction};
use hj_junction::harness::invariants::{monotonicity_probes, random_lipschitz_field};
use hj_junction::scheme::{
    compute_cfl, conservation_residual, discrete_comparison_check, run, BoundaryClosure, RunOptions, Scheme,
    SchemeConfig,
};
use hj_junction::{sample_initial, Grid, GridField, Hamiltonian, Junction};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p2() -> Hamiltonian {
    Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap()
}

fn setup(n: usize, a: f64, field: impl FnOnce(&Grid) -> GridField) -> (Scheme, GridField, f64) {
    let grid = Grid::new(Junction::new(n).unwrap(), 0.05, 40).unwrap();
    let u0 = field(&grid);
    let f: Arc<dyn JunctionFunction> = Arc::new(FluxLimitedF::new(a, vec![p2(); n]).unwrap());
    let s = Scheme::new(&u0, vec![p2(); n], f, BoundaryClosure::FrozenGradient).unwrap();
    let dt = 0.9 * compute_cfl(&s, &u0).unwrap().dt_max;
    (s, u0, dt)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_a_constant_commutes(seed in any::<u64>(), n in 1usize..4, a in -1.0f64..2.0, c in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, u0, dt) = setup(n, a, |g| random_lipschitz_field(g, 1.0, &mut rng));
        let w = s.time_derivative(&u0);
        let w_shift = s.time_derivative(&u0.map(|v| v + c));
        prop_assert!(w.sup_distance(&w_shift) <= 1e-9);
        let (next, _) = s.step(&u0, dt, 0).unwrap();
        let (next_shift, _) = s.step(&u0.map(|v| v + c), dt, 0).unwrap();
        prop_assert!(next.map(|v| v + c).sup_distance(&next_shift) <= 1e-12 * (1.0 + c.abs()) * 10.0);
    }

    #[test]
    fn steps_are_monotone_under_cfl(seed in any::<u64>(), n in 1usize..4, a in -1.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, u0, dt) = setup(n, a, |g| random_lipschitz_field(g, 1.5, &mut rng));
        let probe = monotonicity_probes(&s, &u0, dt, 20, &mut rng).unwrap();
        prop_assert_eq!(probe.failures, 0, "min delta {}", probe.min_delta);
    }

    #[test]
    fn runs_respect_the_monitors(seed in any::<u64>(), n in 1usize..4, a in -1.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, u0, dt) = setup(n, a, |g| random_lipschitz_field(g, 1.0, &mut rng));
        let cfl = compute_cfl(&s, &u0).unwrap();
        let cfg = SchemeConfig::new(0.05, dt, 100.0 * dt).unwrap();
        let opts = RunOptions { bounds: Some(cfl.bounds), stability_constant: None, conservation: true };
        let r = run(&s, &u0, &cfg, &opts, |_, _, _| {}).unwrap();
        prop_assert_eq!(r.monitors.total_violations(), 0, "{:?}", r.monitors);
        prop_assert!(r.monitors.max_conservation_residual <= 1e-12);
    }
}

#[test]
fn zero_data_with_limiter_one_gives_half_dx() {
    let (s, u0, _) = setup(2, 1.0, |g| GridField::constant(*g, 0.0));
    let cfl = compute_cfl(&s, &u0).unwrap();
    assert!((cfl.dt_max - 0.025).abs() < 1e-9, "dt_max = {}", cfl.dt_max);
    assert_eq!(cfl.bounds.m0, -1.0);
}

#[test]
fn ordered_data_stay_ordered() {
    let (s, u0, dt) = setup(3, 1.0, |g| sample_initial(g, |p| 0.5 * p.coordinate).unwrap());
    let v0 = u0.map(|v| v + 0.01);
    assert!(discrete_comparison_check(&s, &u0, &v0, dt, 200).unwrap());
    assert!(discrete_comparison_check(&s, &v0, &u0, dt, 1).is_err());
}

#[test]
fn conservation_form_holds_step_by_step() {
    let (s, u0, dt) = setup(3, 0.5, |g| sample_initial(g, |p| (p.coordinate * 2.0).sin()).unwrap());
    let (next, _) = s.step(&u0, dt, 0).unwrap();
    assert!(conservation_residual(&s, &u0, &next, dt) <= 1e-13);
}

#[test]
fn blowup_is_reported_with_location() {
    let (s, u0, _) = setup(2, 1.0, |g| sample_initial(g, |p| 0.5 * p.coordinate).unwrap());
    let mut bad = u0.clone();
    bad.set(1, 7, f64::NAN);
    let err = s.step(&bad, 0.01, 3).unwrap_err();
    assert!(matches!(err, hj_junction::Error::NumericalBlowup { step: 3, .. }), "{err:?}");
}
