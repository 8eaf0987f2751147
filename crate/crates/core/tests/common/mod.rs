#![allow(dead_code)]

use troppca_core::rng::{self, Rng};
use troppca_core::sim::random_coalescent;
use troppca_core::{TropicalPoint, TropicalPolytope, Ultrametric};

/// Random ultrametric on `m` leaves: a coalescent tree with random height,
/// then a random torus shift.
pub fn random_ultrametric(m: usize, rng: &mut Rng) -> Ultrametric {
    let tree = &random_coalescent(m, 1, rng)[0];
    let scale = rng::uniform(rng, 0.5, 3.0);
    let shift = rng::uniform(rng, -2.0, 2.0);
    let u = tree.cophenetic().unwrap();
    let coords = u.coords().iter().map(|c| c * scale + shift).collect();
    Ultrametric::from_coords(coords).unwrap()
}

pub fn random_point(e: usize, lo: f64, hi: f64, rng: &mut Rng) -> TropicalPoint {
    TropicalPoint::new((0..e).map(|_| rng::uniform(rng, lo, hi)).collect()).unwrap()
}

/// `max_k (a_k + D^(k))` for the given coefficients.
pub fn combination(vertices: &[TropicalPoint], coeffs: &[f64]) -> TropicalPoint {
    let e = vertices[0].dim();
    let coords = (0..e)
        .map(|j| {
            vertices
                .iter()
                .zip(coeffs)
                .map(|(v, a)| a + v.coords()[j])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    TropicalPoint::new(coords).unwrap()
}

pub fn random_combination(vertices: &[TropicalPoint], spread: f64, rng: &mut Rng) -> TropicalPoint {
    let coeffs: Vec<f64> = vertices.iter().map(|_| rng::uniform(rng, -spread, spread)).collect();
    combination(vertices, &coeffs)
}

/// Pairwise definition of the tropical distance, evaluated literally.
pub fn pairwise_dist(v: &TropicalPoint, w: &TropicalPoint) -> f64 {
    let (a, b) = (v.coords(), w.coords());
    let mut best: f64 = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            best = best.max((a[i] - b[i] - a[j] + b[j]).abs());
        }
    }
    best
}

/// Brute-force distance from `d` to `tconv(vertices)` for `e = 3, s = 3`:
/// scans coefficient offsets `(a_2 - a_1, a_3 - a_1)` on a grid of `step`
/// over `[-range, range]^2`.
pub fn grid_residual(vertices: &[TropicalPoint], d: &TropicalPoint, step: f64, range: f64) -> f64 {
    assert_eq!(vertices.len(), 3);
    let steps = (2.0 * range / step).round() as i64;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let a2 = -range + i as f64 * step;
        for j in 0..=steps {
            let a3 = -range + j as f64 * step;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in 0..3 {
                let x = vertices[0].coords()[k]
                    .max(a2 + vertices[1].coords()[k])
                    .max(a3 + vertices[2].coords()[k]);
                let diff = x - d.coords()[k];
                lo = lo.min(diff);
                hi = hi.max(diff);
            }
            best = best.min(hi - lo);
        }
    }
    best
}

/// Brute-force Fermat-Weber objective for `e = 3` over a grid of normalized
/// points `(0, y, z)` covering the normalized bounding box of the sample.
pub fn grid_fermat_weber(sample: &[TropicalPoint], step: f64) -> f64 {
    let norm: Vec<TropicalPoint> = sample.iter().map(|p| p.normalize()).collect();
    let bound = |k: usize| {
        let lo = norm.iter().map(|p| p.coords()[k]).fold(f64::INFINITY, f64::min);
        let hi = norm.iter().map(|p| p.coords()[k]).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (ylo, yhi) = bound(1);
    let (zlo, zhi) = bound(2);
    let ny = ((yhi - ylo) / step).ceil() as i64;
    let nz = ((zhi - zlo) / step).ceil() as i64;
    let mut best = f64::INFINITY;
    for i in 0..=ny {
        let y = ylo + i as f64 * step;
        for j in 0..=nz {
            let z = zlo + j as f64 * step;
            let x = [0.0, y, z];
            let total: f64 = norm
                .iter()
                .map(|p| {
                    let c = p.coords();
                    let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                    d.iter().copied().fold(f64::NEG_INFINITY, f64::max) - d.iter().copied().fold(f64::INFINITY, f64::min)
                })
                .sum();
            best = best.min(total);
        }
    }
    best
}

pub fn polytope(vertices: &[TropicalPoint]) -> TropicalPolytope {
    TropicalPolytope::new(vertices.to_vec()).unwrap()
}
