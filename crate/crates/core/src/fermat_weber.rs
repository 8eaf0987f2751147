//! Tropical Fermat-Weber points and the pull into the sample's tropical
//! convex hull.
//!
//! The sum of tropical distances `Σ_i d_tr(x, D^(i))` is minimized as a
//! linear program over `x` (with `x_0 = 0`) and per-sample bounds
//! `a_i ≥ x_j - D^(i)_j ≥ b_i`, so that `a_i - b_i` is the distance to the
//! i-th point. The minimizer set is a polytope; the returned point is the
//! lexicographically smallest normalized minimizer, found by minimizing each
//! coordinate in turn with the objective held at its optimum.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{minimize_free, Constraint};
use crate::polytope::TropicalPolytope;
use crate::tropical::{dist_unchecked, TropicalPoint, TOLERANCE};

/// Largest ambient dimension accepted, `C(25, 2)`.
pub const MAX_DIM: usize = 300;

/// Tolerance on the objective when pulling a point into the hull.
pub const OBJECTIVE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct FermatWeberResult {
    pub point: TropicalPoint,
    /// Sum of tropical distances from `point` to the sample.
    pub objective: f64,
    /// Whether `point` lies in the tropical convex hull of the sample.
    pub in_hull: bool,
}

/// Sum of tropical distances from `x` to every sample point.
pub fn total_distance(sample: &[TropicalPoint], x: &TropicalPoint) -> Result<f64> {
    sample.iter().map(|d| x.dist(d)).sum()
}

fn check_sample(sample: &[TropicalPoint]) -> Result<usize> {
    let e = sample.first().ok_or(Error::Empty)?.dim();
    if let Some(d) = sample.iter().find(|d| d.dim() != e) {
        return Err(Error::DimensionMismatch { expected: e, found: d.dim() });
    }
    if e > MAX_DIM {
        return Err(Error::TooLarge(format!(
            "dimension {e} exceeds {MAX_DIM} (more than 25 leaves)"
        )));
    }
    Ok(e)
}

/// What the program minimizes.
#[derive(Clone, Copy)]
enum Goal {
    TotalDistance,
    Coordinate(usize),
}

/// Builds and solves one program. `fixed[j]` pins coordinate `j`
/// (coordinate 0 is always pinned to zero); `budget` caps the total distance.
fn solve(sample: &[TropicalPoint], fixed: &[Option<f64>], goal: Goal, budget: Option<f64>) -> Result<Vec<f64>> {
    let e = fixed.len();
    let n = sample.len();
    // free coordinate j -> variable column
    let mut col = alloc::vec![usize::MAX; e];
    let mut nx = 0;
    for j in 0..e {
        if fixed[j].is_none() {
            col[j] = nx;
            nx += 1;
        }
    }
    let nv = nx + 2 * n;
    let a = |i: usize| nx + i;
    let b = |i: usize| nx + n + i;

    let mut constraints = Vec::with_capacity(2 * n * e + 1);
    for (i, d) in sample.iter().enumerate() {
        for (j, &dj) in d.coords().iter().enumerate() {
            // a_i - x_j ≥ -D_j   and   x_j - b_i ≥ D_j
            let mut upper = alloc::vec![0.0; nv];
            let mut lower = alloc::vec![0.0; nv];
            upper[a(i)] = 1.0;
            lower[b(i)] = -1.0;
            let (mut rhs_u, mut rhs_l) = (-dj, dj);
            match fixed[j] {
                Some(v) => {
                    rhs_u += v;
                    rhs_l -= v;
                }
                None => {
                    upper[col[j]] = -1.0;
                    lower[col[j]] = 1.0;
                }
            }
            constraints.push(Constraint { coeffs: upper, rhs: rhs_u });
            constraints.push(Constraint { coeffs: lower, rhs: rhs_l });
        }
    }
    if let Some(limit) = budget {
        let mut coeffs = alloc::vec![0.0; nv];
        for i in 0..n {
            coeffs[a(i)] = -1.0;
            coeffs[b(i)] = 1.0;
        }
        constraints.push(Constraint { coeffs, rhs: -limit });
    }
    let mut cost = alloc::vec![0.0; nv];
    match goal {
        Goal::TotalDistance => {
            for i in 0..n {
                cost[a(i)] = 1.0;
                cost[b(i)] = -1.0;
            }
        }
        Goal::Coordinate(j) => cost[col[j]] = 1.0,
    }
    let sol = minimize_free(&cost, &constraints)?;
    Ok((0..e).map(|j| fixed[j].unwrap_or_else(|| sol.x[col[j]])).collect())
}

/// A tropical Fermat-Weber point of `sample`, deterministic for a given input.
pub fn fermat_weber(sample: &[TropicalPoint]) -> Result<FermatWeberResult> {
    let e = check_sample(sample)?;
    let base = sample[0].normalize();
    // Solve around the first sample point to keep magnitudes small.
    let centered: Vec<TropicalPoint> = sample
        .iter()
        .map(|d| {
            let dn = d.normalize();
            TropicalPoint::new(dn.coords().iter().zip(base.coords()).map(|(x, y)| x - y).collect())
        })
        .collect::<Result<_>>()?;

    let mut fixed: Vec<Option<f64>> = alloc::vec![None; e];
    fixed[0] = Some(0.0);
    let first = solve(&centered, &fixed, Goal::TotalDistance, None)?;
    let best = total_distance(&centered, &TropicalPoint::new(first.clone())?)?;
    let budget = best;

    let mut current = first;
    for j in 1..e {
        match solve(&centered, &fixed, Goal::Coordinate(j), Some(budget)) {
            Ok(x) => current = x,
            // Keep the previous feasible point if a refinement step is
            // numerically infeasible at the tight budget.
            Err(Error::Infeasible(_)) => {}
            Err(err) => return Err(err),
        }
        fixed[j] = Some(current[j]);
    }
    let point = TropicalPoint::new(current.iter().zip(base.coords()).map(|(x, y)| x + y).collect())?;
    let objective = total_distance(sample, &point)?;
    let in_hull = TropicalPolytope::new(sample.to_vec())?.contains(&point)?;
    Ok(FermatWeberResult { point, objective, in_hull })
}

/// Moves a Fermat-Weber point into `tconv(sample)` without changing its
/// objective: every coordinate with an empty type is lowered until some
/// sample point attains its maximum there.
pub fn pull_into_hull(sample: &[TropicalPoint], x: &TropicalPoint) -> Result<TropicalPoint> {
    let e = check_sample(sample)?;
    if x.dim() != e {
        return Err(Error::DimensionMismatch { expected: e, found: x.dim() });
    }
    let before = total_distance(sample, x)?;
    let mut xc: Vec<f64> = x.coords().to_vec();
    for j in 0..e {
        let mut need = f64::INFINITY;
        let mut attained = false;
        for d in sample {
            let dc = d.coords();
            let others = (0..e)
                .filter(|&k| k != j)
                .map(|k| dc[k] - xc[k])
                .fold(f64::NEG_INFINITY, f64::max);
            let gap = others - (dc[j] - xc[j]);
            if gap <= TOLERANCE {
                attained = true;
                break;
            }
            need = need.min(gap);
        }
        if !attained {
            xc[j] -= need;
        }
    }
    let pulled = TropicalPoint::new(xc)?;
    let after = total_distance(sample, &pulled)?;
    if (after - before).abs() > OBJECTIVE_TOL * (1.0 + before) {
        return Err(Error::NotFermatWeber { before, after });
    }
    Ok(pulled)
}

/// Objective recomputed from scratch, for certificates in tests.
pub fn objective_of(sample: &[TropicalPoint], x: &TropicalPoint) -> f64 {
    sample.iter().map(|d| dist_unchecked(x.coords(), d.coords())).sum()
}
