use hj_junction::{geodesic_distance, sample_initial, Grid, Junction, JunctionPoint};
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = JunctionPoint> {
    (0..n, 0.0f64..10.0).prop_map(|(b, x)| JunctionPoint::new(b, x).unwrap())
}

proptest! {
    #[test]
    fn distance_is_a_metric(x in point(4), y in point(4), z in point(4)) {
        let j = Junction::new(4).unwrap();
        let d = |a, b| geodesic_distance(&j, a, b).unwrap();
        prop_assert_eq!(d(x, y), d(y, x));
        prop_assert!(d(x, y) >= 0.0);
        prop_assert!(d(x, z) <= d(x, y) + d(y, z) + 1e-12);
        prop_assert_eq!(d(x, x), 0.0);
    }

    #[test]
    fn distance_to_origin_is_the_coordinate(x in point(3)) {
        let j = Junction::new(3).unwrap();
        prop_assert_eq!(geodesic_distance(&j, x, JunctionPoint::origin()).unwrap(), x.coordinate);
    }

    #[test]
    fn sampled_fields_read_back(n in 1usize..5, i_max in 1usize..30, slope in -3.0f64..3.0) {
        let grid = Grid::new(Junction::new(n).unwrap(), 0.1, i_max).unwrap();
        let u = sample_initial(&grid, |p| slope * p.coordinate).unwrap();
        for a in 0..n {
            prop_assert_eq!(u.get(a, 0), 0.0);
            for i in 0..i_max {
                prop_assert!((u.forward_gradient(a, i) - slope).abs() <= 1e-12 * (1.0 + slope.abs()) * 10.0);
            }
        }
    }
}

#[test]
fn origin_is_shared_and_labels_are_checked() {
    let j = Junction::new(2).unwrap();
    assert!(j.point(2, 0.5).is_err());
    assert!(JunctionPoint::new(0, -1.0).is_err());
    assert_eq!(JunctionPoint::new(1, 0.0).unwrap(), JunctionPoint::origin());
    let grid = Grid::new(j, 0.5, 4).unwrap();
    let mut u = sample_initial(&grid, |_| 1.0).unwrap();
    u.set(1, 0, 3.0);
    assert_eq!(u.get(0, 0), 3.0);
    assert_eq!(grid.length(), 2.0);
}

#[test]
fn multivalued_origin_is_rejected() {
    let grid = Grid::new(Junction::new(2).unwrap(), 0.5, 4).unwrap();
    assert!(sample_initial(&grid, |p| if p.branch == 1 { 1.0 } else { 0.0 }).is_err());
}
