//! Markov chain Monte Carlo search for the best-fit tropical polytope.
//!
//! A chain state is a list of `s` equidistant trees. Each step perturbs
//! every tree (leaf-label permutation on `k` leaves plus a height-preserving
//! branch-length move), scores the proposal by the sum of tropical
//! projection residuals `Π`, and accepts it with probability
//! `min(1, Π_current / Π_proposal)`. `k` starts at the number of leaves and
//! drops by one every `cooling_interval` iterations. The best vertex set seen
//! is kept separately and returned with its fit statistics.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::fermat_weber::{fermat_weber, pull_into_hull};
use crate::polytope::TropicalPolytope;
use crate::rng;
use crate::tree::RootedTree;
use crate::tropical::{dist_unchecked, TropicalPoint, TOLERANCE};
use crate::ultrametric::Ultrametric;

/// Starting vertices of a chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `s` distinct sample trees drawn uniformly without replacement.
    SampleRandom,
    UserSupplied(Vec<Ultrametric>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    /// Number of polytope vertices `s`.
    pub vertices: usize,
    pub iterations: usize,
    /// Iterations between decrements of the permutation size `k`.
    pub cooling_interval: usize,
    pub seed: u64,
    pub chains: usize,
    pub init: Init,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            vertices: 3,
            iterations: 1000,
            cooling_interval: 50,
            seed: 0,
            chains: 1,
            init: Init::SampleRandom,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.vertices < 2 {
            return Err(Error::InvalidConfig("at least 2 vertices are required".to_string()));
        }
        if self.iterations == 0 || self.cooling_interval == 0 || self.chains == 0 {
            return Err(Error::InvalidConfig(
                "iterations, cooling interval and chains must be positive".to_string(),
            ));
        }
        if let Init::UserSupplied(v) = &self.init {
            if v.len() != self.vertices {
                return Err(Error::InvalidConfig(format!(
                    "{} initial vertices supplied for s = {}",
                    v.len(),
                    self.vertices
                )));
            }
        }
        Ok(())
    }
}

/// Fit statistics of a vertex set against a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FitStatistics {
    /// Sum of tropical distances from each sample point to its projection.
    pub pi: f64,
    /// Sum of tropical distances from each projection to `centroid`.
    pub s_reg: f64,
    pub r_squared: f64,
    pub projections: Vec<TropicalPoint>,
    pub lambdas: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Fermat-Weber point of the projections, pulled into their hull.
    pub centroid: TropicalPoint,
}

/// A fitted tropical PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaFit {
    pub vertices: Vec<Ultrametric>,
    /// Trees realizing `vertices`, as carried by the chain.
    pub vertex_trees: Vec<RootedTree>,
    pub projections: Vec<TropicalPoint>,
    pub lambdas: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub pi_unexplained: f64,
    pub s_reg: f64,
    pub r_squared: f64,
    /// Best objective after each iteration.
    pub trace: Vec<f64>,
    /// Index of the chain that produced the fit.
    pub chain: usize,
    pub accepted: usize,
}

fn common_leaves(sample: &[Ultrametric]) -> Result<usize> {
    let m = sample.first().ok_or(Error::Empty)?.leaves();
    if let Some(u) = sample.iter().find(|u| u.leaves() != m) {
        return Err(Error::LeafSetMismatch(m, u.leaves()));
    }
    Ok(m)
}

/// `Π`: the sum over the sample of the residual to `tconv(vertices)`.
pub fn objective(vertices: &[Ultrametric], sample: &[Ultrametric]) -> Result<f64> {
    let poly = TropicalPolytope::from_ultrametrics(vertices)?;
    objective_in(&poly, sample)
}

fn objective_in(poly: &TropicalPolytope, sample: &[Ultrametric]) -> Result<f64> {
    sample.iter().map(|u| poly.residual(u.point())).sum()
}

/// Metropolis step: accept with probability `min(1, current / proposal)`.
/// A zero proposal objective is always accepted.
pub fn metropolis_accept<R: RngCore + ?Sized>(current: f64, proposal: f64, rng: &mut R) -> bool {
    if !(proposal > 0.0) {
        return true;
    }
    let p = (current / proposal).min(1.0);
    p >= 1.0 || rng::unit(rng) < p
}

/// Perturbs one tree in place.
///
/// `k` leaves (chosen without replacement) have their labels permuted by a
/// uniform random permutation. Then an internal branch is chosen uniformly,
/// its length `l` changed by `ε·c` with `ε = ±1` and `c ~ U[0, l/m]`, and the
/// opposite change applied to every branch directly below it so that all
/// root-to-leaf lengths are unchanged. When a lower branch would go negative
/// the move is clamped so that branch ends at exactly zero. Trees without
/// internal branches only get the permutation.
pub fn perturb_tree<R: RngCore + ?Sized>(tree: &mut RootedTree, k: usize, rng: &mut R) {
    let m = tree.leaf_count();
    let k = k.min(m);
    if k >= 2 {
        let chosen = rng::sample_without_replacement(rng, m, k);
        let mut images = chosen.clone();
        rng::shuffle(rng, &mut images);
        let mut perm: Vec<usize> = (0..m).collect();
        for (&from, &to) in chosen.iter().zip(&images) {
            perm[from] = to;
        }
        tree.permute_leaves(&perm);
    }

    let internal = tree.internal_edges();
    if internal.is_empty() {
        return;
    }
    let b1 = internal[rng::below(rng, internal.len())];
    let l1 = tree.length(b1);
    let eps = rng::sign(rng);
    let c = rng::uniform(rng, 0.0, l1 / m as f64);
    let children: Vec<usize> = tree.children(b1).to_vec();
    let (shortest, shortest_len) = children
        .iter()
        .map(|&ch| (ch, tree.length(ch)))
        .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let mut delta = eps * c;
    let clamped = delta > shortest_len;
    if clamped {
        delta = shortest_len;
    }
    tree.set_length(b1, l1 + delta);
    for &ch in &children {
        let v = if clamped && ch == shortest { 0.0 } else { (tree.length(ch) - delta).max(0.0) };
        tree.set_length(ch, v);
    }
}

/// Proposal state: every tree perturbed independently by [`perturb_tree`].
pub fn propose<R: RngCore + ?Sized>(trees: &[RootedTree], k: usize, rng: &mut R) -> Vec<RootedTree> {
    trees
        .iter()
        .map(|t| {
            let mut t = t.clone();
            perturb_tree(&mut t, k, rng);
            t
        })
        .collect()
}

/// `Π`, `S_reg` and `R² = S_reg / (Π + S_reg)` for a vertex set. When
/// `Π + S_reg` is zero, `R²` is 1.
pub fn statistics(vertices: &[Ultrametric], sample: &[Ultrametric]) -> Result<FitStatistics> {
    let m = common_leaves(sample)?;
    if let Some(v) = vertices.iter().find(|v| v.leaves() != m) {
        return Err(Error::LeafSetMismatch(m, v.leaves()));
    }
    let poly = TropicalPolytope::from_ultrametrics(vertices)?;
    let mut projections = Vec::with_capacity(sample.len());
    let mut lambdas = Vec::with_capacity(sample.len());
    let mut residuals = Vec::with_capacity(sample.len());
    for u in sample {
        let proj = poly.project(u.point())?;
        residuals.push(dist_unchecked(u.coords(), proj.point.coords()));
        projections.push(proj.point);
        lambdas.push(proj.lambdas);
    }
    let pi: f64 = residuals.iter().sum();
    let fw = fermat_weber(&projections)?;
    let centroid = pull_into_hull(&projections, &fw.point)?;
    let s_reg: f64 = projections
        .iter()
        .map(|p| dist_unchecked(p.coords(), centroid.coords()))
        .sum();
    let total = pi + s_reg;
    let r_squared = if total > 0.0 { s_reg / total } else { 1.0 };
    Ok(FitStatistics {
        pi,
        s_reg,
        r_squared,
        projections,
        lambdas,
        residuals,
        centroid,
    })
}

fn collapsed(vertices: &[Ultrametric]) -> bool {
    vertices
        .iter()
        .enumerate()
        .any(|(i, a)| vertices[i + 1..].iter().any(|b| a.point().torus_eq(b.point(), TOLERANCE)))
}

fn check_sample(sample: &[Ultrametric], config: &McmcConfig) -> Result<usize> {
    config.validate()?;
    let m = common_leaves(sample)?;
    if sample.len() < config.vertices {
        return Err(Error::SampleTooSmall {
            needed: config.vertices,
            found: sample.len(),
        });
    }
    Ok(m)
}

/// Runs chain `chain` of `config` (stream `seed ^ chain`).
pub fn fit_chain(sample: &[Ultrametric], config: &McmcConfig, chain: usize) -> Result<PcaFit> {
    let m = check_sample(sample, config)?;
    let mut rng = rng::chain_rng(config.seed, chain as u64);
    let start: Vec<&Ultrametric> = match &config.init {
        Init::SampleRandom => rng::sample_without_replacement(&mut rng, sample.len(), config.vertices)
            .into_iter()
            .map(|i| &sample[i])
            .collect(),
        Init::UserSupplied(v) => {
            if let Some(u) = v.iter().find(|u| u.leaves() != m) {
                return Err(Error::LeafSetMismatch(m, u.leaves()));
            }
            v.iter().collect()
        }
    };
    let mut trees: Vec<RootedTree> = start
        .into_iter()
        .map(|u| RootedTree::from_ultrametric(u, None))
        .collect::<Result<_>>()?;
    let current: Vec<Ultrametric> = trees.iter().map(RootedTree::cophenetic).collect::<Result<_>>()?;
    let mut current_obj = objective(&current, sample)?;
    let mut best = (current, trees.clone(), current_obj);
    let mut trace = Vec::with_capacity(config.iterations);
    let mut accepted = 0;
    let mut k = m;

    for i in 1..=config.iterations {
        if i % config.cooling_interval == 0 && k > 0 {
            k -= 1;
        }
        let proposal = propose(&trees, k, &mut rng);
        let proposed: Vec<Ultrametric> = proposal.iter().map(RootedTree::cophenetic).collect::<Result<_>>()?;
        if !collapsed(&proposed) {
            let proposed_obj = objective(&proposed, sample)?;
            if proposed_obj < best.2 {
                best = (proposed, proposal.clone(), proposed_obj);
            }
            if metropolis_accept(current_obj, proposed_obj, &mut rng) {
                trees = proposal;
                current_obj = proposed_obj;
                accepted += 1;
            }
        }
        trace.push(best.2);
    }
    let (vertices, vertex_trees, _) = best;
    let stats = statistics(&vertices, sample)?;
    Ok(PcaFit {
        vertices,
        vertex_trees,
        projections: stats.projections,
        lambdas: stats.lambdas,
        residuals: stats.residuals,
        pi_unexplained: stats.pi,
        s_reg: stats.s_reg,
        r_squared: stats.r_squared,
        trace,
        chain,
        accepted,
    })
}

/// Picks the fit with the largest `R²`; ties go to the smaller `Π`, then to
/// the lower chain index.
pub fn select_best(fits: Vec<PcaFit>) -> Option<PcaFit> {
    fits.into_iter().reduce(|a, b| {
        let better = b.r_squared > a.r_squared
            || (b.r_squared == a.r_squared && b.pi_unexplained < a.pi_unexplained)
            || (b.r_squared == a.r_squared && b.pi_unexplained == a.pi_unexplained && b.chain < a.chain);
        if better {
            b
        } else {
            a
        }
    })
}

/// Runs every chain of `config` in sequence and keeps the best fit.
pub fn fit(sample: &[Ultrametric], config: &McmcConfig) -> Result<PcaFit> {
    check_sample(sample, config)?;
    let fits = (0..config.chains)
        .map(|c| fit_chain(sample, config, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(fits).expect("at least one chain"))
}
