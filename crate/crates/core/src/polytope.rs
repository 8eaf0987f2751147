//! Tropical polytopes: projection onto the tropical convex hull, types,
//! cells, membership, and the origin criterion for polytopes spanned by
//! ultrametrics.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tropical::{dist_unchecked, TropicalPoint, TOLERANCE};
use crate::ultrametric::{LeafPairIndex, Ultrametric};

/// `tconv(D^(1), …, D^(s))`, stored by its vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalPolytope {
    vertices: Vec<TropicalPoint>,
}

/// Result of projecting a point: the projected point and the coefficient
/// `λ_k = min(D - D^(k))` of every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: TropicalPoint,
    pub lambdas: Vec<f64>,
}

/// For each coordinate `j`, the vertices `i` for which `D^(i)_j - x_j`
/// attains the maximum of `D^(i) - x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeVector {
    pub sets: Vec<Vec<usize>>,
}

impl TypeVector {
    /// A point lies in the polytope iff no type set is empty.
    pub fn all_nonempty(&self) -> bool {
        self.sets.iter().all(|s| !s.is_empty())
    }
}

impl TropicalPolytope {
    /// Builds a polytope. Torus-equal duplicate vertices are dropped (first
    /// occurrence kept) with a warning.
    pub fn new(vertices: Vec<TropicalPoint>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::Empty)?;
        let dim = first.dim();
        let mut kept: Vec<TropicalPoint> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            if kept.iter().any(|k| k.torus_eq(&v, TOLERANCE)) {
                log::debug!("dropping duplicate polytope vertex");
                continue;
            }
            kept.push(v);
        }
        Ok(Self { vertices: kept })
    }

    pub fn from_ultrametrics(vertices: &[Ultrametric]) -> Result<Self> {
        Self::new(vertices.iter().map(|u| u.point().clone()).collect())
    }

    pub fn vertices(&self) -> &[TropicalPoint] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    fn check(&self, x: &TropicalPoint) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Tropical projection `⊕_k λ_k ⊙ D^(k)` with `λ_k = min(D - D^(k))`.
    pub fn project(&self, d: &TropicalPoint) -> Result<Projection> {
        self.check(d)?;
        let dc = d.coords();
        let mut out = vec![f64::NEG_INFINITY; dc.len()];
        let mut lambdas = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let lambda = dc
                .iter()
                .zip(v.coords())
                .map(|(a, b)| a - b)
                .fold(f64::INFINITY, f64::min);
            for (o, c) in out.iter_mut().zip(v.coords()) {
                *o = o.max(lambda + c);
            }
            lambdas.push(lambda);
        }
        Ok(Projection {
            point: TropicalPoint::new(out)?,
            lambdas,
        })
    }

    /// Tropical distance from `d` to its projection; zero iff `d` is in the polytope.
    pub fn residual(&self, d: &TropicalPoint) -> Result<f64> {
        let p = self.project(d)?;
        Ok(dist_unchecked(d.coords(), p.point.coords()))
    }

    pub fn type_of(&self, x: &TropicalPoint) -> Result<TypeVector> {
        self.check(x)?;
        let xc = x.coords();
        let mut sets = vec![Vec::new(); xc.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            let diff: Vec<f64> = v.coords().iter().zip(xc).map(|(a, b)| a - b).collect();
            let top = diff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (j, d) in diff.iter().enumerate() {
                if top - d <= TOLERANCE {
                    sets[j].push(i);
                }
            }
        }
        Ok(TypeVector { sets })
    }

    pub fn contains(&self, x: &TropicalPoint) -> Result<bool> {
        Ok(self.type_of(x)?.all_nonempty())
    }

    /// Whether two points of the polytope share a type (lie in one cell).
    pub fn same_cell(&self, x: &TropicalPoint, y: &TropicalPoint) -> Result<bool> {
        let tx = self.type_of(x)?;
        let ty = self.type_of(y)?;
        if !tx.all_nonempty() || !ty.all_nonempty() {
            return Err(Error::OutsidePolytope);
        }
        Ok(tx == ty)
    }
}

/// How the origin test for a polytope spanned by ultrametrics came out.
#[derive(Debug, Clone, PartialEq)]
pub enum OriginWitness {
    /// For every leaf pair (in flat order), a vertex attaining its largest
    /// coordinate at that pair.
    Covered(Vec<usize>),
    /// A leaf pair at which no vertex attains its largest coordinate.
    Uncovered((usize, usize)),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OriginReport {
    /// Verdict of the pair-covering criterion.
    pub by_criterion: bool,
    /// Verdict of `contains` applied to the all-zeros point.
    pub by_type: bool,
    pub witness: OriginWitness,
}

impl OriginReport {
    pub fn in_hull(&self) -> bool {
        self.by_criterion
    }

    pub fn agree(&self) -> bool {
        self.by_criterion == self.by_type
    }
}

/// Whether the star tree (all-zeros point) lies in the tropical convex hull
/// of `vertices`: every leaf pair must be a maximal coordinate of some vertex,
/// i.e. the path between the two leaves runs through that vertex's root.
pub fn origin_in_hull(vertices: &[Ultrametric]) -> Result<OriginReport> {
    let first = vertices.first().ok_or(Error::Empty)?;
    let m = first.leaves();
    if let Some(u) = vertices.iter().find(|u| u.leaves() != m) {
        return Err(Error::LeafSetMismatch(m, u.leaves()));
    }
    let index = LeafPairIndex::new(m);
    let mut cover = Vec::with_capacity(index.dim());
    let mut uncovered = None;
    for k in 0..index.dim() {
        let hit = vertices.iter().position(|u| u.point().max_coord() - u.coords()[k] <= TOLERANCE);
        match hit {
            Some(i) => cover.push(i),
            None => {
                uncovered = Some(index.flat_to_pair(k));
                break;
            }
        }
    }
    let polytope = TropicalPolytope::from_ultrametrics(vertices)?;
    let by_type = polytope.contains(&TropicalPoint::zeros(index.dim())?)?;
    Ok(match uncovered {
        None => OriginReport {
            by_criterion: true,
            by_type,
            witness: OriginWitness::Covered(cover),
        },
        Some(pair) => OriginReport {
            by_criterion: false,
            by_type,
            witness: OriginWitness::Uncovered(pair),
        },
    })
}
