//! Loading tree samples from Newick or CSV files.

use std::path::Path;

use troppca_core::tree::default_labels;
use troppca_core::{RootedTree, Ultrametric};

use crate::error::{AppError, AppResult};
use crate::newick::parse_newick_file;
use crate::vectors::read_vectors;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub labels: Vec<String>,
    pub trees: Vec<RootedTree>,
    pub points: Vec<Ultrametric>,
    /// Indices of trees whose pendant edges were extended.
    pub repaired: Vec<usize>,
    /// Largest pendant extension applied.
    pub max_repair: f64,
}

impl Dataset {
    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn from_trees(trees: Vec<RootedTree>, force_equidistant: bool) -> AppResult<Self> {
        let first = trees.first().ok_or_else(|| AppError::Input("no trees".into()))?;
        let labels = first.labels().to_vec();
        if labels.len() < 3 {
            return Err(AppError::Input(format!("trees need at least 3 leaves, found {}", labels.len())));
        }
        let mut out = Vec::with_capacity(trees.len());
        let mut repaired = Vec::new();
        let mut max_repair: f64 = 0.0;
        for (i, mut t) in trees.into_iter().enumerate() {
            if t.labels() != labels.as_slice() {
                return Err(AppError::Input(format!("tree {} has a different leaf set from tree 1", i + 1)));
            }
            if !t.is_equidistant() {
                if !force_equidistant {
                    let (lo, hi) = t.leaf_depth_range();
                    return Err(AppError::Input(format!(
                        "tree {} is not equidistant (root-to-leaf lengths from {lo} to {hi}); rerun with --force-equidistant to extend pendant edges",
                        i + 1
                    )));
                }
                max_repair = max_repair.max(t.force_equidistant());
                repaired.push(i);
            }
            out.push(t);
        }
        let points = out
            .iter()
            .enumerate()
            .map(|(i, t)| t.cophenetic().map_err(|e| AppError::Input(format!("tree {}: {e}", i + 1))))
            .collect::<AppResult<_>>()?;
        Ok(Self { labels, trees: out, points, repaired, max_repair })
    }

    pub fn from_points(points: Vec<Ultrametric>) -> AppResult<Self> {
        let m = points.first().ok_or_else(|| AppError::Input("no vectors".into()))?.leaves();
        let labels = default_labels(m);
        let trees = points
            .iter()
            .map(|u| RootedTree::from_ultrametric(u, Some(labels.clone())))
            .collect::<Result<_, _>>()?;
        Ok(Self { labels, trees, points, repaired: Vec::new(), max_repair: 0.0 })
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads `path` as CSV vectors when it ends in `.csv`, as Newick otherwise.
pub fn load(path: &Path, force_equidistant: bool) -> AppResult<Dataset> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(&shown, e))?;
    if is_csv(path) {
        return Dataset::from_points(read_vectors(text.as_bytes())?);
    }
    let trees = parse_newick_file(&text).map_err(|errors| AppError::Parse { path: shown, errors })?;
    Dataset::from_trees(trees, force_equidistant)
}
