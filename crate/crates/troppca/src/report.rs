//! JSON documents written and read by the command-line tool.

use serde::{Deserialize, Serialize};
use troppca_core::{RootedTree, TropicalPoint, Ultrametric};

use crate::error::{AppError, AppResult};
use crate::newick::to_newick;

pub const TOOL: &str = "troppca";

/// Newick of the equidistant tree realizing `point`, if it is ultrametric.
pub fn point_newick(point: &TropicalPoint, labels: &[String]) -> Option<String> {
    let u = Ultrametric::from_point(point.clone()).ok()?;
    RootedTree::from_ultrametric(&u, Some(labels.to_vec())).ok().map(|t| to_newick(&t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub m: usize,
    pub labels: Vec<String>,
    /// Vertices as Newick trees.
    pub vertices: Vec<String>,
    /// Vertices as cophenetic vectors, leaf pairs in flat order.
    pub vectors: Vec<Vec<f64>>,
}

impl PolytopeFile {
    pub fn new(vertices: &[Ultrametric], labels: &[String]) -> AppResult<Self> {
        let trees = vertices
            .iter()
            .map(|u| RootedTree::from_ultrametric(u, Some(labels.to_vec())).map(|t| to_newick(&t)))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            m: labels.len(),
            labels: labels.to_vec(),
            vertices: trees,
            vectors: vertices.iter().map(|u| u.coords().to_vec()).collect(),
        })
    }

    pub fn ultrametrics(&self) -> AppResult<Vec<Ultrametric>> {
        let us = self
            .vectors
            .iter()
            .map(|v| Ultrametric::from_coords(v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        if us.iter().any(|u| u.leaves() != self.m) || self.labels.len() != self.m {
            return Err(AppError::Input("polytope file: leaf count disagrees with its vectors".into()));
        }
        Ok(us)
    }

    /// Reads either a bare polytope document or one embedded under `"polytope"`.
    pub fn from_json(text: &str) -> AppResult<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let inner = value.get("polytope").cloned().unwrap_or(value);
        Ok(serde_json::from_value(inner)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfigEcho {
    pub vertices: usize,
    pub iterations: usize,
    pub cooling_interval: usize,
    pub seed: u64,
    pub chains: usize,
    /// `"sample"` or the path of the initial vertex file.
    pub init: String,
    pub force_equidistant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    pub trees: usize,
    pub m: usize,
    /// 0-based indices of trees made equidistant by pendant extension.
    pub repaired: Vec<usize>,
    pub max_repair: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFit {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub lambda: Vec<f64>,
    pub residual: f64,
    pub projection: Vec<f64>,
    pub projection_newick: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub tool: String,
    pub version: String,
    pub config: FitConfigEcho,
    pub input: InputInfo,
    pub polytope: PolytopeFile,
    pub chain: usize,
    pub accepted: usize,
    pub pi: f64,
    pub s_reg: f64,
    pub r_squared: f64,
    pub samples: Vec<SampleFit>,
    /// Best objective after each iteration.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermatWeberReport {
    pub tool: String,
    pub input: InputInfo,
    pub labels: Vec<String>,
    pub objective: f64,
    /// Whether the LP minimizer was already in the hull before pulling.
    pub lp_point_in_hull: bool,
    pub point: Vec<f64>,
    pub newick: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub tool: String,
    pub note: String,
    pub config: FitConfigEcho,
    pub input: InputInfo,
    pub fermat_weber: Vec<f64>,
    pub fermat_weber_newick: String,
    pub fermat_weber_objective: f64,
    pub polytope: PolytopeFile,
    pub pi: f64,
    pub r_squared: f64,
    /// Whether the Fermat-Weber point lies in the fitted polytope.
    pub contains: bool,
    /// Tropical distance from the Fermat-Weber point to the fitted polytope.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedSample {
    pub index: usize,
    pub lambda: Vec<f64>,
    pub residual: f64,
    pub projection: Vec<f64>,
    pub projection_newick: Option<String>,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectReport {
    pub tool: String,
    pub polytope: PolytopeFile,
    pub samples: Vec<ProjectedSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub tool: String,
    pub input: InputInfo,
    pub polytope: PolytopeFile,
    pub pi: f64,
    pub s_reg: f64,
    pub r_squared: f64,
    pub centroid: Vec<f64>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationManifest {
    pub tool: String,
    pub mode: String,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<MixManifest>,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixManifest {
    pub mode: String,
    pub seed: u64,
    pub n: usize,
    /// Group of each tree, in file order.
    pub groups: Vec<String>,
    pub groups_file: String,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> AppResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
