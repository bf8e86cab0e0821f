use hj_junction::vertex::VertexTestFunction;
use hj_junction::{Hamiltonian, JunctionPoint};
use proptest::prelude::*;

fn quadratic_pair(gamma: f64) -> VertexTestFunction {
    let h = Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap();
    VertexTestFunction::new(&[h.clone(), h], 0.0, gamma, 5.0).unwrap()
}

fn mixed(gamma: f64) -> VertexTestFunction {
    let hs = [
        Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap(),
        Hamiltonian::quadratic(0.3, 2.0, 0.5).unwrap(),
        Hamiltonian::quadratic(-0.2, 0.5, 0.2).unwrap(),
    ];
    VertexTestFunction::new(&hs, 0.8, gamma, 5.0).unwrap()
}

fn pair() -> impl Strategy<Value = (JunctionPoint, JunctionPoint)> {
    (0..3usize, 0.0f64..2.4, 0..3usize, 0.0f64..2.4)
        .prop_map(|(a, x, b, y)| (JunctionPoint::new(a, x).unwrap(), JunctionPoint::new(b, y).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn values_are_non_negative((x, y) in pair()) {
        let g = mixed(0.1);
        prop_assert!(g.value_grad(x, y).unwrap().value >= -1e-12);
    }

    #[test]
    fn gradients_are_compatible((x, y) in pair()) {
        let g = mixed(0.1);
        prop_assert!(g.compatibility_defect(x, y).unwrap() <= 0.1 + 1e-12);
    }

    #[test]
    fn diagonal_is_small(b in 0..3usize, x in 0.0f64..5.0) {
        let g = mixed(0.1);
        let p = JunctionPoint::new(b, x).unwrap();
        prop_assert!(g.value_grad(p, p).unwrap().value <= 0.1 + 1e-12);
    }
}

#[test]
fn quadratic_pair_certificate() {
    let g = quadratic_pair(0.1);
    let c = g.certify(2_000, 3).unwrap();
    assert!(c.passed(), "{c:?}");
    assert!((c.hessian_sup_same - 1.0).abs() < 1e-6, "{c:?}");
    assert!((c.hessian_sup_cross - 0.5).abs() < 1e-6, "{c:?}");
}

#[test]
fn certificate_is_deterministic() {
    let g = mixed(0.05);
    assert_eq!(g.certify(500, 9).unwrap(), g.certify(500, 9).unwrap());
}

#[test]
fn rejects_bad_parameters() {
    let h = Hamiltonian::quadratic(0.0, 1.0, 0.0).unwrap();
    assert!(VertexTestFunction::new(&[h.clone(), h.clone()], 0.0, 0.0, 5.0).is_err());
    let abs = Hamiltonian::abs_value(0.0, 1.0, 0.0).unwrap();
    assert!(VertexTestFunction::new(&[h, abs], 0.0, 0.1, 5.0).is_err());
}
