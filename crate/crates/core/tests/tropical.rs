mod common;

use proptest::prelude::*;
use troppca_core::{trop_dist, trop_scale, trop_vec_add, TropicalPoint};

fn point(e: usize) -> impl Strategy<Value = TropicalPoint> {
    prop::collection::vec(-50.0f64..50.0, e).prop_map(|c| TropicalPoint::new(c).unwrap())
}

fn triple() -> impl Strategy<Value = (TropicalPoint, TropicalPoint, TropicalPoint)> {
    (2usize..12).prop_flat_map(|e| (point(e), point(e), point(e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn metric_axioms((u, v, w) in triple()) {
        let uv = trop_dist(&u, &v).unwrap();
        let vu = trop_dist(&v, &u).unwrap();
        let uw = trop_dist(&u, &w).unwrap();
        let wv = trop_dist(&w, &v).unwrap();
        prop_assert!(uv >= 0.0);
        prop_assert_eq!(uv, vu);
        prop_assert!(uv <= uw + wv + 1e-9);
        prop_assert_eq!(trop_dist(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn shortcut_matches_pairwise((u, v, _w) in triple()) {
        let fast = trop_dist(&u, &v).unwrap();
        prop_assert!((fast - common::pairwise_dist(&u, &v)).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn distance_ignores_scaling((u, v, _w) in triple(), a in -100.0f64..100.0, b in -100.0f64..100.0) {
        let d = trop_dist(&u, &v).unwrap();
        let ds = trop_dist(&trop_scale(a, &u), &trop_scale(b, &v)).unwrap();
        prop_assert!((d - ds).abs() < 1e-9);
        prop_assert!(trop_scale(a, &u).torus_eq(&u, 1e-9));
    }

    #[test]
    fn vector_addition_laws((u, v, w) in triple(), a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
        let left = trop_vec_add(0.0, &trop_vec_add(a, &u, b, &v).unwrap(), c, &w).unwrap();
        let right = trop_vec_add(a, &u, 0.0, &trop_vec_add(b, &v, c, &w).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(trop_vec_add(a, &u, b, &v).unwrap(), trop_vec_add(b, &v, a, &u).unwrap());
        prop_assert_eq!(trop_vec_add(a, &u, a, &u).unwrap(), trop_scale(a, &u));
    }

    #[test]
    fn normalization_is_a_torus_representative((u, v, _w) in triple()) {
        let n = u.normalize();
        prop_assert_eq!(n.coords()[0], 0.0);
        prop_assert!(n.torus_eq(&u, 1e-9));
        prop_assert_eq!(u.torus_eq(&v, 1e-9), trop_dist(&u, &v).unwrap() < 1e-9);
    }
}

#[test]
fn mismatched_dimensions_are_errors() {
    let a = TropicalPoint::zeros(3).unwrap();
    let b = TropicalPoint::zeros(4).unwrap();
    assert!(trop_dist(&a, &b).is_err());
    assert!(trop_vec_add(0.0, &a, 0.0, &b).is_err());
    assert!(TropicalPoint::new(vec![1.0]).is_err());
    assert!(TropicalPoint::new(vec![1.0, f64::NAN]).is_err());
}
