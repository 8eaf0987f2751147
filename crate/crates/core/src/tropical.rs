//! Max-plus arithmetic on the tropical projective torus.
//!
//! Tropical addition is `max`, tropical multiplication is `+`. Points live in
//! `R^e / R1`: two coordinate vectors name the same point when their
//! difference is a constant vector. Arithmetic keeps raw coordinates; the
//! canonical representative (first coordinate zero) is only produced by
//! [`TropicalPoint::normalize`] and used for comparisons and output.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Absolute tolerance for every equality and max-attainment test in the crate.
pub const TOLERANCE: f64 = 1e-9;

/// Tropical sum `a ⊕ b = max(a, b)`. `-inf` is the identity.
#[inline]
pub fn trop_add(a: f64, b: f64) -> f64 {
    if a >= b {
        a
    } else {
        b
    }
}

/// A point of the tropical projective torus, stored by one representative.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalPoint {
    coords: Vec<f64>,
}

impl TropicalPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::TooFewCoordinates(coords.len()));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coords })
    }

    /// The all-zeros point (the star tree when indexed by leaf pairs).
    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(alloc::vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Tropical scalar multiplication `a ⊙ v`.
    pub fn scale(&self, a: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c + a).collect(),
        }
    }

    /// Representative with first coordinate zero.
    pub fn normalize(&self) -> Self {
        let first = self.coords[0];
        Self {
            coords: self.coords.iter().map(|c| c - first).collect(),
        }
    }

    pub fn min_coord(&self) -> f64 {
        self.coords.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_coord(&self) -> f64 {
        self.coords.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Equality in the torus: normalized representatives agree coordinatewise
    /// within `tol`.
    pub fn torus_eq(&self, other: &Self, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let (a0, b0) = (self.coords[0], other.coords[0]);
        self.coords
            .iter()
            .zip(&other.coords)
            .all(|(a, b)| ((a - a0) - (b - b0)).abs() <= tol)
    }

    pub fn dist(&self, other: &Self) -> Result<f64> {
        trop_dist(self, other)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// `a ⊙ v`.
pub fn trop_scale(a: f64, v: &TropicalPoint) -> TropicalPoint {
    v.scale(a)
}

/// `a ⊙ v ⊕ b ⊙ w`, the coordinatewise max of the shifted vectors.
pub fn trop_vec_add(a: f64, v: &TropicalPoint, b: f64, w: &TropicalPoint) -> Result<TropicalPoint> {
    v.check_dim(w)?;
    Ok(TropicalPoint {
        coords: v
            .coords
            .iter()
            .zip(&w.coords)
            .map(|(x, y)| trop_add(a + x, b + y))
            .collect(),
    })
}

/// Generalized Hilbert projective metric, `max_i(v_i - w_i) - min_i(v_i - w_i)`.
pub fn trop_dist(v: &TropicalPoint, w: &TropicalPoint) -> Result<f64> {
    v.check_dim(w)?;
    Ok(dist_unchecked(&v.coords, &w.coords))
}

#[inline]
pub(crate) fn dist_unchecked(v: &[f64], w: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (a, b) in v.iter().zip(w) {
        let d = a - b;
        hi = hi.max(d);
        lo = lo.min(d);
    }
    hi - lo
}
