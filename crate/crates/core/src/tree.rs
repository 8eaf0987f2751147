//! Rooted phylogenetic trees with branch lengths, and the conversions
//! between equidistant trees and ultrametrics.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tropical::TropicalPoint;
use crate::ultrametric::{single_linkage, LeafPairIndex, TreeTopology, Ultrametric};

/// Relative spread of root-to-leaf lengths tolerated by [`RootedTree::cophenetic`].
pub const EQUIDISTANT_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
struct Node {
    parent: Option<usize>,
    children: Vec<usize>,
    /// Length of the edge to the parent; unused for the root.
    length: f64,
    leaf: Option<usize>,
}

/// A rooted tree whose leaves carry indices `0..m` into a label table.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    nodes: Vec<Node>,
    root: usize,
    labels: Vec<String>,
    leaf_nodes: Vec<usize>,
    root_length: Option<f64>,
}

impl RootedTree {
    /// Builds a tree from parent links. `leaf_of[n]` is the leaf index of
    /// node `n` (must be `Some` exactly for childless nodes) and `labels[i]`
    /// names leaf `i`.
    pub fn from_parents(
        parents: Vec<Option<usize>>,
        lengths: Vec<f64>,
        leaf_of: Vec<Option<usize>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if lengths.len() != n || leaf_of.len() != n {
            return Err(Error::InvalidTree("parents, lengths and leaves differ in size".to_string()));
        }
        let mut nodes: Vec<Node> = (0..n)
            .map(|i| Node {
                parent: parents[i],
                children: Vec::new(),
                length: lengths[i],
                leaf: leaf_of[i],
            })
            .collect();
        let mut root = None;
        for i in 0..n {
            match parents[i] {
                None if root.is_some() => return Err(Error::InvalidTree("more than one root".to_string())),
                None => root = Some(i),
                Some(p) if p >= n || p == i => {
                    return Err(Error::InvalidTree(format!("node {i} has invalid parent {p}")))
                }
                Some(p) => nodes[p].children.push(i),
            }
            if parents[i].is_some() && !(lengths[i].is_finite() && lengths[i] >= 0.0) {
                return Err(Error::InvalidTree(format!("branch length {} is not a nonnegative number", lengths[i])));
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root".to_string()))?;

        let m = labels.len();
        let mut leaf_nodes = vec![usize::MAX; m];
        let mut visited = 0;
        let mut stack = vec![root];
        let mut seen = vec![false; n];
        while let Some(v) = stack.pop() {
            if seen[v] {
                return Err(Error::InvalidTree("cycle in parent links".to_string()));
            }
            seen[v] = true;
            visited += 1;
            let node = &nodes[v];
            match (node.children.is_empty(), node.leaf) {
                (true, Some(l)) if l < m && leaf_nodes[l] == usize::MAX => leaf_nodes[l] = v,
                (true, Some(l)) => {
                    return Err(Error::InvalidTree(format!("leaf index {l} is out of range or repeated")))
                }
                (true, None) => return Err(Error::InvalidTree(format!("leaf node {v} has no label"))),
                (false, Some(_)) => {
                    return Err(Error::InvalidTree(format!("internal node {v} carries a leaf index")))
                }
                (false, None) => {}
            }
            stack.extend(node.children.iter().rev());
        }
        if visited != n {
            return Err(Error::InvalidTree("tree is not connected".to_string()));
        }
        if leaf_nodes.contains(&usize::MAX) {
            return Err(Error::InvalidTree("label table names a leaf that is not in the tree".to_string()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTree("duplicate leaf labels".to_string()));
        }
        Ok(Self {
            nodes,
            root,
            labels,
            leaf_nodes,
            root_length: None,
        })
    }

    /// Builds a tree whose leaves are named; leaf indices follow
    /// [`canonical_label_order`].
    pub fn from_named(parents: Vec<Option<usize>>, lengths: Vec<f64>, names: Vec<Option<String>>) -> Result<Self> {
        let mut labels: Vec<String> = names.iter().flatten().cloned().collect();
        canonical_label_order(&mut labels);
        let leaf_of = names
            .iter()
            .map(|name| name.as_ref().map(|nm| labels.iter().position(|l| l == nm).unwrap()))
            .collect();
        Self::from_parents(parents, lengths, leaf_of, labels)
    }

    /// A star tree: `m` leaves hanging from the root with length `h`.
    pub fn star(m: usize, h: f64) -> Result<Self> {
        let mut parents = vec![None];
        let mut lengths = vec![0.0];
        let mut leaf_of = vec![None];
        for l in 0..m {
            parents.push(Some(0));
            lengths.push(h);
            leaf_of.push(Some(l));
        }
        Self::from_parents(parents, lengths, leaf_of, default_labels(m))
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_length(&self) -> Option<f64> {
        self.root_length
    }

    pub fn set_root_length(&mut self, length: Option<f64>) {
        self.root_length = length;
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.nodes[node].children
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.nodes[node].parent
    }

    pub fn length(&self, node: usize) -> f64 {
        self.nodes[node].length
    }

    pub fn set_length(&mut self, node: usize, length: f64) {
        debug_assert!(length >= 0.0);
        self.nodes[node].length = length;
    }

    pub fn leaf_index(&self, node: usize) -> Option<usize> {
        self.nodes[node].leaf
    }

    pub fn leaf_node(&self, leaf: usize) -> usize {
        self.leaf_nodes[leaf]
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.nodes[node].children.is_empty()
    }

    /// Nodes in preorder (parents before children, children in stored order).
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.nodes[v].children.iter().rev());
        }
        out
    }

    /// Non-root internal nodes; each names the internal branch above it.
    pub fn internal_edges(&self) -> Vec<usize> {
        self.preorder()
            .into_iter()
            .filter(|&v| v != self.root && !self.is_leaf(v))
            .collect()
    }

    /// Root-to-node path lengths, indexed by node.
    pub fn depths(&self) -> Vec<f64> {
        let mut depth = vec![0.0; self.nodes.len()];
        for v in self.preorder() {
            if let Some(p) = self.nodes[v].parent {
                depth[v] = depth[p] + self.nodes[v].length;
            }
        }
        depth
    }

    /// Smallest and largest root-to-leaf length.
    pub fn leaf_depth_range(&self) -> (f64, f64) {
        let depth = self.depths();
        self.leaf_nodes
            .iter()
            .map(|&v| depth[v])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }

    /// Largest root-to-leaf length.
    pub fn height(&self) -> f64 {
        self.leaf_depth_range().1
    }

    pub fn is_equidistant(&self) -> bool {
        let (lo, hi) = self.leaf_depth_range();
        hi - lo <= EQUIDISTANT_REL_TOL * hi.abs()
    }

    /// Extends pendant edges so every leaf sits at the largest root-to-leaf
    /// length. Returns the largest extension applied.
    pub fn force_equidistant(&mut self) -> f64 {
        let depth = self.depths();
        let target = self.height();
        let mut largest: f64 = 0.0;
        for &v in &self.leaf_nodes {
            let gap = target - depth[v];
            if gap > 0.0 {
                self.nodes[v].length += gap;
                largest = largest.max(gap);
            }
        }
        largest
    }

    /// Sorted leaf indices below each node, indexed by node.
    pub fn leaf_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for v in self.preorder().into_iter().rev() {
            if let Some(l) = self.nodes[v].leaf {
                sets[v].push(l);
            } else {
                let mut merged: Vec<usize> = self.nodes[v].children.iter().flat_map(|&c| sets[c].iter().copied()).collect();
                merged.sort_unstable();
                sets[v] = merged;
            }
        }
        sets
    }

    pub fn leaves_below(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            match self.nodes[v].leaf {
                Some(l) => out.push(l),
                None => stack.extend(&self.nodes[v].children),
            }
        }
        out.sort_unstable();
        out
    }

    /// The clade family of the tree as drawn. Zero-length internal edges
    /// still contribute their clade.
    pub fn topology(&self) -> TreeTopology {
        TreeTopology::from_clades(self.leaf_count(), self.leaf_sets())
            .expect("clades of a tree are laminar")
    }

    /// Relabels leaf `i` as leaf `perm[i]`; `perm` must be a permutation.
    pub fn permute_leaves(&mut self, perm: &[usize]) {
        debug_assert_eq!(perm.len(), self.leaf_count());
        let mut leaf_nodes = vec![0; perm.len()];
        for (old, &v) in self.leaf_nodes.iter().enumerate() {
            let new = perm[old];
            self.nodes[v].leaf = Some(new);
            leaf_nodes[new] = v;
        }
        self.leaf_nodes = leaf_nodes;
    }

    /// Re-indexes the leaves to follow `labels`, which must hold the same
    /// names in some order.
    pub fn with_label_order(&self, labels: &[String]) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::LeafSetMismatch(self.labels.len(), labels.len()));
        }
        let mut perm = Vec::with_capacity(labels.len());
        for name in &self.labels {
            match labels.iter().position(|l| l == name) {
                Some(p) => perm.push(p),
                None => return Err(Error::InvalidTree(format!("label {name} is not in the target label table"))),
            }
        }
        let mut out = self.clone();
        out.permute_leaves(&perm);
        out.labels = labels.to_vec();
        Ok(out)
    }

    /// Cophenetic vector: for leaves `i < j`, twice the height of their
    /// lowest common ancestor above the leaves. Fails if root-to-leaf lengths
    /// spread more than [`EQUIDISTANT_REL_TOL`] relative to the tree height.
    pub fn cophenetic(&self) -> Result<Ultrametric> {
        let (lo, hi) = self.leaf_depth_range();
        if !(hi - lo <= EQUIDISTANT_REL_TOL * hi.abs()) {
            return Err(Error::NotEquidistant { min: lo, max: hi });
        }
        let m = self.leaf_count();
        let index = LeafPairIndex::new(m);
        if m < 3 {
            return Err(Error::TooFewCoordinates(index.dim()));
        }
        let depth = self.depths();
        let sets = self.leaf_sets();
        let mut coords = vec![0.0; index.dim()];
        for v in 0..self.nodes.len() {
            let children = &self.nodes[v].children;
            let d = 2.0 * (hi - depth[v]);
            for (a, &ca) in children.iter().enumerate() {
                for &cb in &children[a + 1..] {
                    for &i in &sets[ca] {
                        for &j in &sets[cb] {
                            coords[index.pair_to_flat(i, j)] = d;
                        }
                    }
                }
            }
        }
        Ok(Ultrametric::new_unchecked(TropicalPoint::new(coords)?, m))
    }

    /// The equidistant tree realizing `u`: single-linkage merges become
    /// internal nodes at half their merge distance. If `u` has negative
    /// coordinates it is first shifted so its minimum is zero.
    pub fn from_ultrametric(u: &Ultrametric, labels: Option<Vec<String>>) -> Result<Self> {
        let m = u.leaves();
        let labels = labels.unwrap_or_else(|| default_labels(m));
        if labels.len() != m {
            return Err(Error::LeafSetMismatch(m, labels.len()));
        }
        let shift = (-u.point().min_coord()).max(0.0);
        let coords: Vec<f64> = u.coords().iter().map(|c| c + shift).collect();
        let merges = single_linkage(&coords, m);
        let n = m + merges.len();
        let mut heights = vec![0.0; n];
        let mut parents = vec![None; n];
        for (k, mg) in merges.iter().enumerate() {
            heights[m + k] = mg.distance / 2.0;
            for &c in &mg.children {
                parents[c] = Some(m + k);
            }
        }
        let lengths = (0..n)
            .map(|v| parents[v].map_or(0.0, |p| (heights[p] - heights[v]).max(0.0)))
            .collect();
        let leaf_of = (0..n).map(|v| (v < m).then_some(v)).collect();
        Self::from_parents(parents, lengths, leaf_of, labels)
    }
}

/// Default label table `"1", …, "m"`.
pub fn default_labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| i.to_string()).collect()
}

/// Sorts labels numerically when every label is a nonnegative integer,
/// lexicographically otherwise.
pub fn canonical_label_order(labels: &mut [String]) {
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<u64>().unwrap());
    } else {
        labels.sort();
    }
}
