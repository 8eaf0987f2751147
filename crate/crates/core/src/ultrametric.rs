//! Dissimilarity maps indexed by leaf pairs, the three-point condition, and
//! the rooted topology an ultrametric encodes.
//!
//! Leaves are numbered `0..m` here; user-facing labels live in the tree's
//! label table. A dissimilarity map is flattened to `e = m(m-1)/2`
//! coordinates in lexicographic pair order `(0,1), (0,2), …, (m-2,m-1)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tropical::{TropicalPoint, TOLERANCE};

/// Bijection between leaf pairs `i < j` and flat coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafPairIndex {
    m: usize,
}

impl LeafPairIndex {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    /// Recover `m` from the number of coordinates.
    pub fn from_dim(e: usize) -> Result<Self> {
        let mut m = 3;
        while m * (m - 1) / 2 < e {
            m += 1;
        }
        if m * (m - 1) / 2 == e {
            Ok(Self { m })
        } else {
            Err(Error::NotPairIndexed { len: e })
        }
    }

    pub fn leaves(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m * (self.m - 1) / 2
    }

    /// Flat index of the pair `{i, j}`; order of the arguments does not matter.
    ///
    /// Panics if `i == j` or either leaf is out of range.
    #[inline]
    pub fn pair_to_flat(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        assert!(i != j && j < self.m, "invalid leaf pair ({i}, {j}) for m = {}", self.m);
        i * self.m - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn flat_to_pair(&self, k: usize) -> (usize, usize) {
        assert!(k < self.dim(), "flat index {k} out of range");
        let mut i = 0;
        let mut start = 0;
        loop {
            let row = self.m - i - 1;
            if k < start + row {
                return (i, i + 1 + (k - start));
            }
            start += row;
            i += 1;
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m).flat_map(move |i| (i + 1..self.m).map(move |j| (i, j)))
    }
}

/// Outcome of the three-point test: every triple whose maximum is unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricCheck {
    pub violations: Vec<(usize, usize, usize)>,
}

impl UltrametricCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that, for every leaf triple, the maximum of the three pairwise
/// values is attained at least twice.
pub fn is_ultrametric(point: &TropicalPoint, m: usize) -> Result<UltrametricCheck> {
    let index = LeafPairIndex::new(m);
    if m < 3 || point.dim() != index.dim() {
        return Err(Error::DimensionMismatch {
            expected: if m < 2 { 0 } else { index.dim() },
            found: point.dim(),
        });
    }
    let c = point.coords();
    let mut violations = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let dij = c[index.pair_to_flat(i, j)];
            for k in j + 1..m {
                let dik = c[index.pair_to_flat(i, k)];
                let djk = c[index.pair_to_flat(j, k)];
                if !max_attained_twice(dij, dik, djk) {
                    violations.push((i, j, k));
                }
            }
        }
    }
    Ok(UltrametricCheck { violations })
}

#[inline]
fn max_attained_twice(a: f64, b: f64, c: f64) -> bool {
    let mut v = [a, b, c];
    v.sort_by(f64::total_cmp);
    v[2] - v[1] <= TOLERANCE
}

/// A point of the tropical linear space of ultrametrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Ultrametric {
    point: TropicalPoint,
    index: LeafPairIndex,
}

impl Ultrametric {
    pub fn new(point: TropicalPoint, m: usize) -> Result<Self> {
        let check = is_ultrametric(&point, m)?;
        if let Some(&(i, j, k)) = check.violations.first() {
            return Err(Error::NotUltrametric(i, j, k));
        }
        Ok(Self {
            point,
            index: LeafPairIndex::new(m),
        })
    }

    /// Validates `point`, inferring the leaf count from its dimension.
    pub fn from_point(point: TropicalPoint) -> Result<Self> {
        let m = LeafPairIndex::from_dim(point.dim())?.leaves();
        Self::new(point, m)
    }

    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        Self::from_point(TropicalPoint::new(coords)?)
    }

    /// Skips validation; callers guarantee the three-point condition.
    pub(crate) fn new_unchecked(point: TropicalPoint, m: usize) -> Self {
        Self {
            point,
            index: LeafPairIndex::new(m),
        }
    }

    pub fn point(&self) -> &TropicalPoint {
        &self.point
    }

    pub fn into_point(self) -> TropicalPoint {
        self.point
    }

    pub fn coords(&self) -> &[f64] {
        self.point.coords()
    }

    pub fn leaves(&self) -> usize {
        self.index.leaves()
    }

    pub fn index(&self) -> LeafPairIndex {
        self.index
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.point.coords()[self.index.pair_to_flat(i, j)]
    }

    /// Adds `c` to every coordinate; the result is the same torus point.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            point: self.point.scale(c),
            index: self.index,
        }
    }
}

/// Rooted hierarchy as a sorted family of sorted clades, without heights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeTopology {
    m: usize,
    clades: Vec<Vec<usize>>,
}

impl TreeTopology {
    /// Builds a topology from any collection of clades; singletons and the
    /// full leaf set are added, duplicates removed. Fails if the family is
    /// not laminar or names a leaf outside `0..m`.
    pub fn from_clades(m: usize, clades: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut all: Vec<Vec<usize>> = clades
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .filter(|c| !c.is_empty())
            .collect();
        if all.iter().flatten().any(|&l| l >= m) {
            return Err(Error::InvalidTree(alloc::format!("clade names a leaf outside 0..{m}")));
        }
        all.extend((0..m).map(|l| alloc::vec![l]));
        all.push((0..m).collect());
        all.sort();
        all.dedup();
        for (a, ca) in all.iter().enumerate() {
            for cb in &all[a + 1..] {
                if !laminar(ca, cb) {
                    return Err(Error::InvalidTree(alloc::format!(
                        "clades {ca:?} and {cb:?} overlap without nesting"
                    )));
                }
            }
        }
        Ok(Self { m, clades: all })
    }

    pub fn leaves(&self) -> usize {
        self.m
    }

    pub fn clades(&self) -> &[Vec<usize>] {
        &self.clades
    }

    /// Clades other than singletons and the root.
    pub fn nontrivial_clades(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.clades.iter().filter(move |c| c.len() > 1 && c.len() < self.m)
    }
}

fn laminar(a: &[usize], b: &[usize]) -> bool {
    let inter = a.iter().filter(|x| b.binary_search(x).is_ok()).count();
    inter == 0 || inter == a.len() || inter == b.len()
}

/// One agglomeration step of single linkage: the clusters in `children`
/// (node ids; leaves are `0..m`, merge `k` is node `m + k`) fuse at `distance`.
#[derive(Debug, Clone)]
pub(crate) struct Merge {
    pub distance: f64,
    pub children: Vec<usize>,
    pub members: Vec<usize>,
}

/// Single-linkage agglomeration of the dissimilarity `coords` on `m` leaves.
/// Pair values within [`TOLERANCE`] of the first value of their group merge
/// simultaneously, producing multifurcations.
pub(crate) fn single_linkage(coords: &[f64], m: usize) -> Vec<Merge> {
    let index = LeafPairIndex::new(m);
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by(|&a, &b| coords[a].total_cmp(&coords[b]).then(a.cmp(&b)));

    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // node id of the cluster currently rooted at each union-find root
    let mut node_of_root: Vec<usize> = (0..m).collect();
    let mut merges: Vec<Merge> = Vec::new();

    let mut start = 0;
    while start < order.len() {
        let base = coords[order[start]];
        let mut end = start;
        while end < order.len() && coords[order[end]] - base <= TOLERANCE {
            end += 1;
        }
        let before: Vec<usize> = (0..m)
            .map(|l| {
                let r = find(&mut parent, l);
                node_of_root[r]
            })
            .collect();
        let mut changed = false;
        for &k in &order[start..end] {
            let (i, j) = index.flat_to_pair(k);
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
                changed = true;
            }
        }
        if changed {
            // Leaves are visited in increasing order, so each new cluster's
            // children are listed by smallest leaf.
            let mut seen_roots: Vec<usize> = Vec::new();
            for l in 0..m {
                let r = find(&mut parent, l);
                if seen_roots.contains(&r) {
                    continue;
                }
                seen_roots.push(r);
                let mut children: Vec<usize> = Vec::new();
                let mut members: Vec<usize> = Vec::new();
                for (leaf, &old) in before.iter().enumerate() {
                    if find(&mut parent, leaf) == r {
                        members.push(leaf);
                        if !children.contains(&old) {
                            children.push(old);
                        }
                    }
                }
                if children.len() > 1 {
                    node_of_root[r] = m + merges.len();
                    merges.push(Merge {
                        distance: base,
                        children,
                        members,
                    });
                }
            }
        }
        start = end;
    }
    merges
}

/// The clade family realized by `u`, obtained by single-linkage merging.
pub fn topology_of(u: &Ultrametric) -> TreeTopology {
    let m = u.leaves();
    let mut clades: Vec<Vec<usize>> = (0..m).map(|l| alloc::vec![l]).collect();
    clades.extend(single_linkage(u.coords(), m).into_iter().map(|mg| mg.members));
    clades.sort();
    clades.dedup();
    TreeTopology { m, clades }
}

/// Same as [`topology_of`] for a raw point, validating it first.
pub fn topology_of_point(point: &TropicalPoint, m: usize) -> Result<TreeTopology> {
    let u = Ultrametric::new(point.clone(), m)?;
    Ok(topology_of(&u))
}

pub fn topologies_equal(a: &TreeTopology, b: &TreeTopology) -> Result<bool> {
    if a.m != b.m {
        return Err(Error::LeafSetMismatch(a.m, b.m));
    }
    Ok(a.clades == b.clades)
}
