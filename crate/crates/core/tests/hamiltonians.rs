use hj_junction::hamiltonian::validate_hamiltonian;
use hj_junction::{Hamiltonian, Side};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Hamiltonian> {
    (0..3usize, -2.0f64..2.0, 0.3f64..3.0, -2.0f64..2.0).prop_map(|(k, c, s, o)| match k {
        0 => Hamiltonian::quadratic(c, s, o).unwrap(),
        1 => Hamiltonian::abs_value(c, s, o).unwrap(),
        _ => Hamiltonian::asymmetric(),
    })
}

proptest! {
    #[test]
    fn envelopes_are_monotone_and_recover_h(h in family(), p in -5.0f64..5.0, dp in 0.0f64..2.0) {
        prop_assert!(h.minus(p + dp) <= h.minus(p) + 1e-12);
        prop_assert!(h.plus(p + dp) >= h.plus(p) - 1e-12);
        prop_assert!((h.minus(p).max(h.plus(p)) - h.eval(p)).abs() <= 1e-12 * (1.0 + h.eval(p).abs()));
        prop_assert!(h.minus(p).min(h.plus(p)) >= h.min_value() - 1e-12);
    }

    #[test]
    fn generalized_inverses_hit_the_level(h in family(), lift in 0.0f64..20.0) {
        let a = h.min_value() + lift;
        let lo = h.inverse(Side::Minus, a);
        let hi = h.inverse(Side::Plus, a);
        prop_assert!(lo <= h.p0() + 1e-9 && hi >= h.p0() - 1e-9);
        prop_assert!((h.eval(lo) - a).abs() <= 1e-8 * (1.0 + a.abs()));
        prop_assert!((h.eval(hi) - a).abs() <= 1e-8 * (1.0 + a.abs()));
        prop_assert!((h.inverse_by_bisection(Side::Minus, a) - lo).abs() <= 1e-8 * (1.0 + lo.abs()));
        prop_assert!((h.inverse_by_bisection(Side::Plus, a) - hi).abs() <= 1e-8 * (1.0 + hi.abs()));
    }

    #[test]
    fn levels_below_the_minimum_clamp(h in family(), drop in 0.0f64..5.0) {
        let a = h.min_value() - drop;
        prop_assert!((h.inverse(Side::Minus, a) - h.p0()).abs() <= 1e-9);
        prop_assert!((h.inverse(Side::Plus, a) - h.p0()).abs() <= 1e-9);
    }

    #[test]
    fn tilt_and_reflection(h in family(), p in -4.0f64..4.0) {
        let (t, shift) = h.tilt_normalize();
        prop_assert_eq!(t.p0(), 0.0);
        prop_assert!((t.eval(p) - h.eval(p + shift)).abs() <= 1e-12 * (1.0 + h.eval(p + shift).abs()));
        let r = h.reflected();
        prop_assert_eq!(r.eval(p), h.eval(-p));
        prop_assert_eq!(r.p0(), -h.p0());
    }
}

#[test]
fn validation_report_on_library_families() {
    let rep = validate_hamiltonian(&|p: f64| p * p, (-4.0, 4.0), 401, None).unwrap();
    assert!(rep.passed());
    assert!(rep.coercive());
    let bad = validate_hamiltonian(&|p: f64| (3.0 * p).sin(), (-4.0, 4.0), 401, None);
    assert!(bad.map(|r| !r.passed()).unwrap_or(true));
}
