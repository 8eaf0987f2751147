mod common;

use troppca_core::fermat_weber::{objective_of, total_distance};
use troppca_core::rng;
use troppca_core::{fermat_weber, is_ultrametric, pull_into_hull, TropicalPoint, TropicalPolytope};

#[test]
fn objective_matches_grid_search() {
    let mut rng = rng::seeded(40);
    for _ in 0..40 {
        let sample: Vec<TropicalPoint> = (0..3).map(|_| common::random_point(3, 0.0, 2.0, &mut rng)).collect();
        let fw = fermat_weber(&sample).unwrap();
        let grid = common::grid_fermat_weber(&sample, 0.01);
        assert!(fw.objective <= grid + 1e-9, "lp {} above grid {grid}", fw.objective);
        assert!(grid <= fw.objective + 0.03 + 1e-9);
    }
}

#[test]
fn local_optimality_and_equivariance() {
    let mut rng = rng::seeded(41);
    for _ in 0..100 {
        let e = 3 + rng::below(&mut rng, 5);
        let n = 2 + rng::below(&mut rng, 6);
        let sample: Vec<TropicalPoint> = (0..n).map(|_| common::random_point(e, -3.0, 3.0, &mut rng)).collect();
        let fw = fermat_weber(&sample).unwrap();
        assert!((fw.objective - objective_of(&sample, &fw.point)).abs() < 1e-9);
        for j in 0..e {
            for h in [-1e-3, 1e-3] {
                let mut c = fw.point.coords().to_vec();
                c[j] += h;
                let moved = total_distance(&sample, &TropicalPoint::new(c).unwrap()).unwrap();
                assert!(moved >= fw.objective - 1e-9);
            }
        }
        let t: Vec<f64> = (0..e).map(|_| rng::uniform(&mut rng, -5.0, 5.0)).collect();
        let shifted: Vec<TropicalPoint> = sample
            .iter()
            .map(|p| TropicalPoint::new(p.coords().iter().zip(&t).map(|(a, b)| a + b).collect()).unwrap())
            .collect();
        let fw2 = fermat_weber(&shifted).unwrap();
        assert!((fw2.objective - fw.objective).abs() < 1e-7);
    }
}

#[test]
fn pulled_points_are_in_the_hull_and_ultrametric() {
    let mut rng = rng::seeded(42);
    for _ in 0..200 {
        let n = 3 + rng::below(&mut rng, 6);
        let sample: Vec<TropicalPoint> = (0..n)
            .map(|_| common::random_ultrametric(4, &mut rng).into_point())
            .collect();
        let fw = fermat_weber(&sample).unwrap();
        let pulled = pull_into_hull(&sample, &fw.point).unwrap();
        let poly = TropicalPolytope::new(sample.clone()).unwrap();
        assert!(poly.contains(&pulled).unwrap());
        assert!(is_ultrametric(&pulled, 4).unwrap().is_ok());
        let after = objective_of(&sample, &pulled);
        assert!((after - fw.objective).abs() <= 1e-7 * (1.0 + fw.objective));
    }
}
