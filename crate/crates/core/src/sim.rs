//! Synthetic equidistant trees: unit-height caterpillars with random branch
//! lengths, and coalescent genealogies rescaled to unit height.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::rng;
use crate::tree::{default_labels, RootedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    FixedCaterpillar,
    RandomCoalescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub m: usize,
    pub n: usize,
    pub mode: SimMode,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 3 || self.n < 1 {
            return Err(Error::InvalidConfig(alloc::format!(
                "simulation needs m >= 3 and n >= 1, got m = {}, n = {}",
                self.m,
                self.n
            )));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Vec<RootedTree>> {
        self.validate()?;
        let mut rng = rng::seeded(self.seed);
        Ok(match self.mode {
            SimMode::FixedCaterpillar => random_caterpillar(self.m, self.n, &mut rng),
            SimMode::RandomCoalescent => random_coalescent(self.m, self.n, &mut rng),
        })
    }
}

/// `n` unit-height caterpillars `((…((1,2),3)…),m)` with random branch lengths.
///
/// The spine below the root carries interior edges `b_1, …, b_{m-2}` (root
/// side first), drawn sequentially as `l(b_j) ~ U[0, 1 - Σ_{k<j} l(b_k)]`.
/// Leaf `m` hangs from the root with pendant length 1; every other leaf's
/// pendant edge takes up whatever height is left below its attachment point.
pub fn random_caterpillar<R: RngCore + ?Sized>(m: usize, n: usize, rng: &mut R) -> Vec<RootedTree> {
    assert!(m >= 3, "a caterpillar needs at least 3 leaves");
    (0..n).map(|_| caterpillar_once(m, rng)).collect()
}

fn caterpillar_once<R: RngCore + ?Sized>(m: usize, rng: &mut R) -> RootedTree {
    // spine node t (0 = root) at height 1 - Σ_{k≤t} l(b_k)
    let spine = m - 1;
    let mut heights = vec![1.0; spine];
    let mut used = 0.0;
    for t in 1..spine {
        let len = rng::uniform(rng, 0.0, 1.0 - used);
        used += len;
        heights[t] = (1.0 - used).max(0.0);
    }
    let mut parents = Vec::with_capacity(spine + m);
    let mut lengths = Vec::with_capacity(spine + m);
    let mut leaf_of = Vec::with_capacity(spine + m);
    for t in 0..spine {
        parents.push(t.checked_sub(1));
        lengths.push(if t == 0 { 0.0 } else { heights[t - 1] - heights[t] });
        leaf_of.push(None);
    }
    // leaf j (0-based) attaches to spine node m-1-j, except leaves 0 and 1
    // which share the deepest spine node.
    for j in 0..m {
        let at = if j <= 1 { spine - 1 } else { m - 1 - j };
        parents.push(Some(at));
        lengths.push(heights[at]);
        leaf_of.push(Some(j));
    }
    RootedTree::from_parents(parents, lengths, leaf_of, default_labels(m)).expect("caterpillar is a valid tree")
}

/// `n` coalescent genealogies on `m` leaves rescaled to unit height: with `j`
/// lineages left, wait `Exp(j(j-1)/2)` and merge two uniformly chosen ones.
pub fn random_coalescent<R: RngCore + ?Sized>(m: usize, n: usize, rng: &mut R) -> Vec<RootedTree> {
    assert!(m >= 2, "a coalescent needs at least 2 leaves");
    (0..n).map(|_| coalescent_once(m, rng)).collect()
}

fn coalescent_once<R: RngCore + ?Sized>(m: usize, rng: &mut R) -> RootedTree {
    let total = 2 * m - 1;
    let mut heights = vec![0.0; total];
    let mut parents: Vec<Option<usize>> = vec![None; total];
    let mut lineages: Vec<usize> = (0..m).collect();
    let mut time = 0.0;
    let mut next = m;
    while lineages.len() > 1 {
        let j = lineages.len() as f64;
        time += rng::exponential(rng, j * (j - 1.0) / 2.0);
        let a = rng::below(rng, lineages.len());
        let x = lineages.swap_remove(a);
        let b = rng::below(rng, lineages.len());
        let y = lineages.swap_remove(b);
        heights[next] = time;
        parents[x] = Some(next);
        parents[y] = Some(next);
        lineages.push(next);
        next += 1;
    }
    let root_height = heights[total - 1];
    for h in &mut heights {
        *h /= root_height;
    }
    heights[total - 1] = 1.0;
    let lengths = (0..total)
        .map(|v| parents[v].map_or(0.0, |p| heights[p] - heights[v]))
        .collect();
    let leaf_of = (0..total).map(|v| (v < m).then_some(v)).collect();
    RootedTree::from_parents(parents, lengths, leaf_of, default_labels(m)).expect("coalescent tree is valid")
}

/// Trees from two sources with their group index (0 or 1) per tree.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub trees: Vec<RootedTree>,
    pub groups: Vec<usize>,
}

impl LabeledDataset {
    pub fn from_groups(first: Vec<RootedTree>, second: Vec<RootedTree>) -> Result<Self> {
        let m = first.first().or(second.first()).ok_or(Error::Empty)?.leaf_count();
        if let Some(t) = first.iter().chain(&second).find(|t| t.leaf_count() != m) {
            return Err(Error::LeafSetMismatch(m, t.leaf_count()));
        }
        let groups = core::iter::repeat_n(0, first.len())
            .chain(core::iter::repeat_n(1, second.len()))
            .collect();
        let mut trees = first;
        trees.extend(second);
        Ok(Self { trees, groups })
    }
}

/// Concatenates the datasets generated by two configurations, group 0 first.
pub fn mixture_experiment(a: &SimConfig, b: &SimConfig) -> Result<LabeledDataset> {
    if a.m != b.m {
        return Err(Error::LeafSetMismatch(a.m, b.m));
    }
    LabeledDataset::from_groups(a.generate()?, b.generate()?)
}
