//! Dense two-phase simplex for linear programs of the form
//!
//! ```text
//! minimize  c·x   subject to  A x ≥ b,   x free
//! ```
//!
//! The programs met in this crate have a handful of variables and many
//! constraints, so the solver works on the dual `max b·y, Aᵀy = c, y ≥ 0`,
//! whose tableau has one row per primal variable. The primal solution is
//! read off the simplex multipliers at the dual optimum.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;

/// `a · x ≥ rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Solves `min c·x` subject to every constraint, with `x` unrestricted in sign.
pub fn minimize_free(c: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let nv = c.len();
    let nc = constraints.len();
    if constraints.iter().any(|k| k.coeffs.len() != nv) {
        return Err(Error::DimensionMismatch {
            expected: nv,
            found: constraints.iter().map(|k| k.coeffs.len()).find(|&l| l != nv).unwrap_or(0),
        });
    }
    if nv == 0 {
        return Ok(LpSolution { x: Vec::new(), value: 0.0 });
    }

    // Dual tableau: nv rows, nc structural columns, nv artificial columns, rhs.
    let width = nc + nv + 1;
    let rhs_col = nc + nv;
    let mut sign = vec![1.0; nv];
    let mut t = vec![0.0; nv * width];
    for r in 0..nv {
        if c[r] < 0.0 {
            sign[r] = -1.0;
        }
        let row = &mut t[r * width..(r + 1) * width];
        for (j, k) in constraints.iter().enumerate() {
            row[j] = sign[r] * k.coeffs[r];
        }
        row[nc + r] = 1.0;
        row[rhs_col] = sign[r] * c[r];
    }
    let mut tab = Tableau {
        t,
        width,
        rows: nv,
        basis: (nc..nc + nv).collect(),
    };

    // Phase 1: drive the artificials out.
    let mut cost1 = vec![0.0; nc + nv];
    for a in &mut cost1[nc..] {
        *a = 1.0;
    }
    tab.run(&cost1, nc + nv)?;
    let infeasibility: f64 = (0..nv)
        .filter(|&r| tab.basis[r] >= nc)
        .map(|r| tab.at(r, rhs_col))
        .sum();
    let scale = 1.0 + c.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if infeasibility > 1e-8 * scale {
        return Err(Error::Infeasible("unbounded"));
    }
    for r in 0..nv {
        if tab.basis[r] >= nc {
            if let Some(j) = (0..nc).find(|&j| tab.at(r, j).abs() > 1e-9) {
                tab.pivot(r, j);
            }
        }
    }

    // Phase 2 on the dual objective `min -b·y`; artificials may not re-enter.
    let mut cost2 = vec![0.0; nc + nv];
    for (j, k) in constraints.iter().enumerate() {
        cost2[j] = -k.rhs;
    }
    tab.run(&cost2, nc)?;

    // x_r = sign_r · (reduced cost of artificial r) = -sign_r · Σ_i c_B(i) B⁻¹[i][r]
    let mut x = vec![0.0; nv];
    for (r, xr) in x.iter_mut().enumerate() {
        let mut pi = 0.0;
        for i in 0..nv {
            let cb = cost2[tab.basis[i]];
            if cb != 0.0 {
                pi += cb * tab.at(i, nc + r);
            }
        }
        *xr = -sign[r] * pi;
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, value })
}

struct Tableau {
    t: Vec<f64>,
    width: usize,
    rows: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.t[pr * w + pc];
        for v in &mut self.t[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        let (before, rest) = self.t.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Minimizes `cost` over the current basis; only columns `< enter_limit`
    /// may enter. Dantzig pricing, switching to Bland's rule after a run of
    /// degenerate pivots.
    fn run(&mut self, cost: &[f64], enter_limit: usize) -> Result<()> {
        let ncols = self.width - 1;
        let rhs = ncols;
        let max_iter = 50 * (self.rows + ncols) + 1000;
        let mut degenerate_run = 0usize;
        let mut in_basis = vec![false; ncols];
        for &b in &self.basis {
            in_basis[b] = true;
        }
        for _ in 0..max_iter {
            // simplex multipliers via reduced costs of candidate columns
            let bland = degenerate_run > 50;
            let mut enter = None;
            let mut best = -COST_EPS;
            for j in 0..enter_limit {
                if in_basis[j] {
                    continue;
                }
                let mut d = cost[j];
                for r in 0..self.rows {
                    let a = self.at(r, j);
                    if a != 0.0 {
                        d -= cost[self.basis[r]] * a;
                    }
                }
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(pc) = enter else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.at(r, rhs).max(0.0) / a;
                    match leave {
                        Some((lr, lratio))
                            if ratio > lratio + 1e-12
                                || (ratio >= lratio - 1e-12 && self.basis[r] > self.basis[lr]) => {}
                        _ => leave = Some((r, ratio)),
                    }
                }
            }
            let Some((pr, ratio)) = leave else {
                return Err(Error::Infeasible("infeasible"));
            };
            degenerate_run = if ratio <= 1e-12 { degenerate_run + 1 } else { 0 };
            in_basis[self.basis[pr]] = false;
            in_basis[pc] = true;
            self.pivot(pr, pc);
        }
        Err(Error::Infeasible("not converging within the iteration limit"))
    }
}
