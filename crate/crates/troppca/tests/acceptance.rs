//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use troppca::newick::{parse_newick, to_newick};
use troppca::runner::{median_r_squared, run_sensitivity, SensitivityGrid};
use troppca_core::mcmc::propose;
use troppca_core::rng::{self, Rng};
use troppca_core::sim::{random_caterpillar, random_coalescent, SimMode};
use troppca_core::ultrametric::topology_of_point;
use troppca_core::{
    fermat_weber, fit, is_ultrametric, metropolis_accept, pull_into_hull, Init, McmcConfig, RootedTree, TropicalPoint,
    TropicalPolytope, Ultrametric,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn point(c: Vec<f64>) -> TropicalPoint {
    TropicalPoint::new(c).unwrap()
}

fn random_point(e: usize, lo: f64, hi: f64, rng: &mut Rng) -> TropicalPoint {
    point((0..e).map(|_| rng::uniform(rng, lo, hi)).collect())
}

fn combination(vertices: &[TropicalPoint], coeffs: &[f64]) -> TropicalPoint {
    let e = vertices[0].dim();
    point(
        (0..e)
            .map(|j| vertices.iter().zip(coeffs).map(|(v, a)| a + v.coords()[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect(),
    )
}

fn random_ultrametric(m: usize, rng: &mut Rng) -> Ultrametric {
    let u = random_coalescent(m, 1, rng)[0].cophenetic().unwrap();
    let scale = rng::uniform(rng, 0.5, 3.0);
    let shift = rng::uniform(rng, -2.0, 2.0);
    Ultrametric::from_coords(u.coords().iter().map(|c| c * scale + shift).collect()).unwrap()
}

fn dist3(x: [f64; 3], d: &[f64]) -> f64 {
    let diff = [x[0] - d[0], x[1] - d[1], x[2] - d[2]];
    diff.iter().copied().fold(f64::NEG_INFINITY, f64::max) - diff.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Smallest distance from `d` to `max(D1, a2 + D2, a3 + D3)` over a grid of
/// `(a2, a3)` with the given step on `[-range, range]^2`.
fn grid_residual(v: &[TropicalPoint], d: &TropicalPoint, step: f64, range: f64) -> f64 {
    let n = (2.0 * range / step).round() as i64;
    let (v0, v1, v2) = (v[0].coords(), v[1].coords(), v[2].coords());
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let a2 = -range + i as f64 * step;
        for j in 0..=n {
            let a3 = -range + j as f64 * step;
            let x = [
                v0[0].max(a2 + v1[0]).max(a3 + v2[0]),
                v0[1].max(a2 + v1[1]).max(a3 + v2[1]),
                v0[2].max(a2 + v1[2]).max(a3 + v2[2]),
            ];
            best = best.min(dist3(x, d.coords()));
        }
    }
    best
}

fn c1_projection_oracle() -> Outcome {
    let mut rng = rng::seeded(1001);
    let (step, tol) = (0.01, 1e-6);
    let (mut worst_above, mut worst_below) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..500 {
        let v: Vec<TropicalPoint> = (0..3).map(|_| random_point(3, 0.0, 2.0, &mut rng)).collect();
        let d = random_point(3, 0.0, 2.0, &mut rng);
        let r = TropicalPolytope::new(v.clone()).unwrap().residual(&d).unwrap();
        // coefficients of the nearest point lie in [-4, 4] for data in [0, 2]^3
        let g = grid_residual(&v, &d, step, 4.0);
        worst_above = worst_above.max(r - g);
        worst_below = worst_below.max(g - r);
    }
    outcome(
        worst_above <= tol && worst_below <= step + tol,
        format!("500 instances; projection minus grid optimum at most {worst_above:.2e}, grid above projection at most {worst_below:.2e} (step {step})"),
    )
}

fn c2_worked_example() -> Outcome {
    let five = [
        point(vec![0.0, 0.0, 0.0]),
        point(vec![0.0, 3.0, 0.0]),
        point(vec![0.0, 3.0, 3.0]),
        point(vec![0.0, 1.0, 2.0]),
        point(vec![0.0, 2.0, 1.0]),
    ];
    let poly = TropicalPolytope::new(five[..3].to_vec()).unwrap();
    let p = poly.project(&five[3]).unwrap();
    let q = p.point.normalize();
    let exact = q.coords().iter().zip([0.0, 1.0, 1.0]).all(|(a, b)| (a - b).abs() <= 1e-12);
    let residual = poly.residual(&five[3]).unwrap();
    let mut agree = true;
    for x in &five {
        let fixed = poly.project(x).unwrap().point.torus_eq(x, 1e-12);
        agree &= fixed == poly.contains(x).unwrap();
    }
    outcome(
        exact && (residual - 1.0).abs() <= 1e-12 && agree,
        format!("projection {:?}, residual {residual}, membership agrees on all five: {agree}", q.coords()),
    )
}

fn c3_cell_topology() -> Outcome {
    let mut rng = rng::seeded(1003);
    let (mut pairs, mut not_ultra, mut topo_diff) = (0, 0, 0);
    for _ in 0..1000 {
        let m = 4 + rng::below(&mut rng, 2);
        let s = 3 + rng::below(&mut rng, 2);
        let v: Vec<TropicalPoint> = (0..s).map(|_| random_ultrametric(m, &mut rng).into_point()).collect();
        let poly = TropicalPolytope::new(v.clone()).unwrap();
        let mut found = 0;
        for _ in 0..200 {
            if found == 2 {
                break;
            }
            let a: Vec<f64> = (0..s).map(|_| rng::uniform(&mut rng, -1.0, 1.0)).collect();
            let size = [1e-3, 1e-2, 0.1, 0.5][rng::below(&mut rng, 4)];
            let b: Vec<f64> = a.iter().map(|x| x + rng::uniform(&mut rng, -size, size)).collect();
            let (x, y) = (combination(&v, &a), combination(&v, &b));
            if !poly.same_cell(&x, &y).unwrap() {
                continue;
            }
            found += 1;
            pairs += 1;
            let ux = is_ultrametric(&x, m).unwrap().is_ok();
            let uy = is_ultrametric(&y, m).unwrap().is_ok();
            if !(ux && uy) {
                not_ultra += 1;
            } else if topology_of_point(&x, m).unwrap() != topology_of_point(&y, m).unwrap() {
                topo_diff += 1;
            }
        }
    }
    outcome(
        pairs >= 1000 && not_ultra == 0 && topo_diff == 0,
        format!("1000 polytopes, {pairs} same-cell pairs; {not_ultra} non-ultrametric, {topo_diff} topology mismatches"),
    )
}

fn c4_origin_criterion() -> Outcome {
    let mut rng = rng::seeded(1004);
    let (mut disagree, mut inside) = (0, 0);
    for _ in 0..1000 {
        let m = 4 + rng::below(&mut rng, 3);
        let s = 2 + rng::below(&mut rng, 5);
        let v: Vec<Ultrametric> = (0..s).map(|_| random_ultrametric(m, &mut rng)).collect();
        // every leaf pair is a largest coordinate of some vertex
        let covered = (0..m * (m - 1) / 2)
            .all(|k| v.iter().any(|u| u.point().max_coord() - u.coords()[k] <= 1e-9));
        let poly = TropicalPolytope::from_ultrametrics(&v).unwrap();
        let contains = poly.contains(&TropicalPoint::zeros(m * (m - 1) / 2).unwrap()).unwrap();
        let report = troppca_core::origin_in_hull(&v).unwrap();
        if covered != contains || report.in_hull() != contains || !report.agree() {
            disagree += 1;
        }
        inside += contains as usize;
    }
    outcome(disagree == 0, format!("1000 vertex sets ({inside} containing the origin), {disagree} disagreements"))
}

fn c5_fermat_weber() -> Outcome {
    let mut rng = rng::seeded(1005);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let sample: Vec<TropicalPoint> = (0..3).map(|_| random_point(3, 0.0, 2.0, &mut rng).normalize()).collect();
        let lp = fermat_weber(&sample).unwrap().objective;
        let lo = |k: usize| sample.iter().map(|p| p.coords()[k]).fold(f64::INFINITY, f64::min);
        let hi = |k: usize| sample.iter().map(|p| p.coords()[k]).fold(f64::NEG_INFINITY, f64::max);
        let step = 0.01;
        let mut grid = f64::INFINITY;
        let (ny, nz) = (((hi(1) - lo(1)) / step).ceil() as i64, ((hi(2) - lo(2)) / step).ceil() as i64);
        for i in 0..=ny {
            for j in 0..=nz {
                let x = [0.0, lo(1) + i as f64 * step, lo(2) + j as f64 * step];
                grid = grid.min(sample.iter().map(|p| dist3(x, p.coords())).sum());
            }
        }
        worst = worst.max(lp - grid);
    }
    let mut failures = 0;
    let mut worst_drift: f64 = 0.0;
    for _ in 0..500 {
        let n = 3 + rng::below(&mut rng, 8);
        let sample: Vec<TropicalPoint> = (0..n).map(|_| random_ultrametric(4, &mut rng).into_point()).collect();
        let fw = fermat_weber(&sample).unwrap();
        match pull_into_hull(&sample, &fw.point) {
            Ok(x) => {
                let before: f64 = sample.iter().map(|d| fw.point.dist(d).unwrap()).sum();
                let after: f64 = sample.iter().map(|d| x.dist(d).unwrap()).sum();
                worst_drift = worst_drift.max((after - before).abs());
                let inside = TropicalPolytope::new(sample.clone()).unwrap().contains(&x).unwrap();
                if !inside || !is_ultrametric(&x, 4).unwrap().is_ok() || (after - before).abs() > 1e-7 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        worst <= 0.02 && failures == 0,
        format!("(a) LP minus grid optimum at most {worst:.2e} over 200; (b) {failures} of 500 pulled points fail, objective drift at most {worst_drift:.1e}"),
    )
}

fn c6_exact_fit() -> Outcome {
    let mut rng = rng::seeded(1006);
    let (mut worst_pi, mut worst_r2, mut rising) = (0.0f64, 0.0f64, 0);
    let runs = 20;
    for run in 0..runs {
        let m = 4 + run % 3;
        let v: Vec<Ultrametric> = random_coalescent(m, 3, &mut rng).iter().map(|t| t.cophenetic().unwrap()).collect();
        let pts: Vec<TropicalPoint> = v.iter().map(|u| u.point().clone()).collect();
        let sample: Vec<Ultrametric> = (0..20)
            .map(|_| {
                let a: Vec<f64> = (0..3).map(|_| rng::uniform(&mut rng, 0.0, 0.5)).collect();
                Ultrametric::from_point(combination(&pts, &a)).unwrap()
            })
            .collect();
        let at_truth = McmcConfig {
            iterations: 50,
            cooling_interval: 10,
            seed: run as u64,
            init: Init::UserSupplied(v),
            ..McmcConfig::default()
        };
        let f = fit(&sample, &at_truth).unwrap();
        worst_pi = worst_pi.max(f.pi_unexplained.abs());
        worst_r2 = worst_r2.max((f.r_squared - 1.0).abs());
        let random_start = McmcConfig { iterations: 50, cooling_interval: 10, seed: run as u64, ..McmcConfig::default() };
        for f in [f, fit(&sample, &random_start).unwrap()] {
            rising += f.trace.windows(2).filter(|w| w[1] > w[0]).count();
        }
    }
    outcome(
        worst_pi <= 1e-9 && worst_r2 <= 1e-9 && rising == 0,
        format!("{runs} datasets: max |Π| {worst_pi:.1e}, max |R² - 1| {worst_r2:.1e}, {rising} trace increases over {} runs", 2 * runs),
    )
}

fn c7_metropolis() -> Outcome {
    let mut rng = rng::seeded(1007);
    let trials = 10_000;
    let hits = (0..trials).filter(|_| metropolis_accept(5.0, 10.0, &mut rng)).count();
    let freq = hits as f64 / trials as f64;
    outcome((freq - 0.5).abs() <= 0.02, format!("acceptance frequency {freq:.4} for (5, 10) over {trials} trials"))
}

fn c8_sensitivity() -> Outcome {
    let mut failed = 0;
    let mut detail = Vec::new();
    for seed in 0..5 {
        let grid = SensitivityGrid {
            leaves: vec![4],
            trees: vec![25],
            iterations: vec![10, 1000],
            chains: 10,
            mode: SimMode::FixedCaterpillar,
            seed,
            vertices: 3,
            cooling_interval: 50,
        };
        let rows = run_sensitivity(&grid, 0).unwrap();
        let (short, long) = (median_r_squared(&rows, 10).unwrap(), median_r_squared(&rows, 1000).unwrap());
        if long < short {
            failed += 1;
        }
        detail.push(format!("seed {seed}: {short:.3} -> {long:.3}"));
    }
    outcome(failed <= 1, format!("median R² at 10 -> 1000 iterations, {failed} of 5 seeds failing ({})", detail.join(", ")))
}

fn c9_proposals() -> Outcome {
    let mut rng = rng::seeded(1009);
    let mut bad = 0;
    for i in 0..10_000 {
        let m = 3 + rng::below(&mut rng, 7);
        let start = if i % 2 == 0 {
            random_coalescent(m, 1, &mut rng).remove(0)
        } else {
            random_caterpillar(m, 1, &mut rng).remove(0)
        };
        let k = rng::below(&mut rng, m + 1);
        let out = propose(std::slice::from_ref(&start), k, &mut rng).remove(0);
        let (lo, hi) = out.leaf_depth_range();
        let h = start.height();
        let negative = (0..out.node_count()).any(|v| out.length(v) < 0.0);
        if negative || (hi - h).abs() > 1e-9 || (lo - h).abs() > 1e-9 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad} of 10000 proposals invalid"))
}

fn c10_determinism() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_troppca"))
            .current_dir(dir)
            .env_remove("TROPPCA_SEED")
            .args(["fit", "--input", "tests/fixtures/toy.nwk", "--vertices", "3", "--iterations", "1000", "--seed", "42", "--chains", "4"])
            .output()
            .expect("binary runs")
            .stdout
    };
    let (a, b) = (run(), run());
    let golden = std::fs::read(dir.join("tests/fixtures/toy_fit.json")).unwrap_or_default();
    outcome(
        !a.is_empty() && a == b && a == golden,
        format!(
            "two runs identical: {}; matches golden output recorded on x86_64 Linux: {}",
            a == b,
            a == golden
        ),
    )
}

fn c11_newick() -> Outcome {
    let mut rng = rng::seeded(1011);
    let mut broken = 0;
    for i in 0..1000 {
        let m = 3 + rng::below(&mut rng, 10);
        let t: RootedTree = if i % 2 == 0 {
            random_coalescent(m, 1, &mut rng).remove(0)
        } else {
            random_caterpillar(m, 1, &mut rng).remove(0)
        };
        let ok = parse_newick(&to_newick(&t))
            .ok()
            .and_then(|b| b.cophenetic().ok())
            .is_some_and(|u| u.point().torus_eq(t.cophenetic().unwrap().point(), 1e-9));
        broken += (!ok) as usize;
    }
    let corpus: Vec<String> = serde_json::from_str(include_str!("fixtures/negative_newick.json")).unwrap();
    let accepted = corpus
        .iter()
        .filter(|s| !matches!(std::panic::catch_unwind(|| parse_newick(s).is_err()), Ok(true)))
        .count();
    outcome(
        broken == 0 && corpus.len() >= 20 && accepted == 0,
        format!("{broken} of 1000 round trips broken; {accepted} of {} malformed strings not rejected", corpus.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("projection oracle", c1_projection_oracle),
        ("worked five-point example", c2_worked_example),
        ("cell topology", c3_cell_topology),
        ("origin criterion", c4_origin_criterion),
        ("Fermat-Weber", c5_fermat_weber),
        ("exact fit at the optimum", c6_exact_fit),
        ("Metropolis ratio", c7_metropolis),
        ("sensitivity trend", c8_sensitivity),
        ("proposal validity", c9_proposals),
        ("determinism", c10_determinism),
        ("Newick round trip", c11_newick),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name} [{:.1}s]: {}", i + 1, start.elapsed().as_secs_f64(), o.detail);
        failures += (!o.pass) as usize;
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
