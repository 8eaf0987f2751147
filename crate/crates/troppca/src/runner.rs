//! Multi-chain fits and the sensitivity grid, run on a bounded thread pool.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use troppca_core::mcmc::{fit_chain, select_best};
use troppca_core::sim::{SimConfig, SimMode};
use troppca_core::{McmcConfig, PcaFit, Ultrametric};

use crate::error::{AppError, AppResult};

fn pool(threads: usize) -> AppResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AppError::Usage(format!("thread pool: {e}")))
}

/// Runs every chain of `config` concurrently (`threads = 0` uses all cores)
/// and keeps the best. The result does not depend on `threads`.
pub fn fit_parallel(sample: &[Ultrametric], config: &McmcConfig, threads: usize) -> AppResult<PcaFit> {
    config.validate()?;
    let fits = pool(threads)?.install(|| {
        (0..config.chains)
            .into_par_iter()
            .map(|c| fit_chain(sample, config, c))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(select_best(fits).expect("at least one chain"))
}

pub fn mode_name(mode: SimMode) -> &'static str {
    match mode {
        SimMode::FixedCaterpillar => "caterpillar",
        SimMode::RandomCoalescent => "coalescent",
    }
}

pub fn parse_mode(s: &str) -> AppResult<SimMode> {
    match s {
        "caterpillar" | "fixed-caterpillar" => Ok(SimMode::FixedCaterpillar),
        "coalescent" | "random-coalescent" => Ok(SimMode::RandomCoalescent),
        other => Err(AppError::Usage(format!("unknown mode '{other}' (caterpillar or coalescent)"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityGrid {
    pub leaves: Vec<usize>,
    pub trees: Vec<usize>,
    pub iterations: Vec<usize>,
    pub chains: usize,
    pub mode: SimMode,
    pub seed: u64,
    pub vertices: usize,
    pub cooling_interval: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub topology_mode: String,
    pub m: usize,
    pub n: usize,
    pub iterations: usize,
    pub chain: usize,
    pub r_squared: f64,
    pub pi: f64,
    pub runtime_ms: u128,
}

/// One row per (m, n, iterations, chain), in that nesting order. Every cell
/// with the same (m, n) fits the same dataset, generated from `seed`; chain
/// `c` uses stream `seed ^ c` at every iteration budget.
pub fn run_sensitivity(grid: &SensitivityGrid, threads: usize) -> AppResult<Vec<SensitivityRow>> {
    let mut datasets = Vec::new();
    for &m in &grid.leaves {
        for &n in &grid.trees {
            let sim = SimConfig { m, n, mode: grid.mode, seed: grid.seed };
            let points = sim
                .generate()?
                .iter()
                .map(|t| t.cophenetic())
                .collect::<Result<Vec<_>, _>>()?;
            datasets.push((m, n, points));
        }
    }
    let mut items = Vec::new();
    for (d, _) in datasets.iter().enumerate() {
        for &iterations in &grid.iterations {
            for chain in 0..grid.chains {
                items.push((d, iterations, chain));
            }
        }
    }
    pool(threads)?.install(|| {
        items
            .par_iter()
            .map(|&(d, iterations, chain)| {
                let (m, n, points) = &datasets[d];
                let config = McmcConfig {
                    vertices: grid.vertices,
                    iterations,
                    cooling_interval: grid.cooling_interval,
                    seed: grid.seed,
                    chains: 1,
                    ..McmcConfig::default()
                };
                let start = Instant::now();
                let fit = fit_chain(points, &config, chain)?;
                Ok(SensitivityRow {
                    topology_mode: mode_name(grid.mode).to_string(),
                    m: *m,
                    n: *n,
                    iterations,
                    chain,
                    r_squared: fit.r_squared,
                    pi: fit.pi_unexplained,
                    runtime_ms: start.elapsed().as_millis(),
                })
            })
            .collect()
    })
}

/// Median `R²` over the rows with the given iteration budget.
pub fn median_r_squared(rows: &[SensitivityRow], iterations: usize) -> Option<f64> {
    let mut v: Vec<f64> = rows.iter().filter(|r| r.iterations == iterations).map(|r| r.r_squared).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Some(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_row_count_and_range() {
        let grid = SensitivityGrid {
            leaves: vec![4],
            trees: vec![5],
            iterations: vec![10, 100],
            chains: 10,
            mode: SimMode::FixedCaterpillar,
            seed: 1,
            vertices: 3,
            cooling_interval: 50,
        };
        let rows = run_sensitivity(&grid, 2).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.r_squared)));
        assert!(median_r_squared(&rows, 10).is_some());
    }

    #[test]
    fn thread_count_does_not_change_the_fit() {
        let sim = SimConfig { m: 5, n: 8, mode: SimMode::RandomCoalescent, seed: 3 };
        let pts: Vec<Ultrametric> = sim.generate().unwrap().iter().map(|t| t.cophenetic().unwrap()).collect();
        let config = McmcConfig { iterations: 40, chains: 4, seed: 5, ..McmcConfig::default() };
        let a = fit_parallel(&pts, &config, 1).unwrap();
        let b = fit_parallel(&pts, &config, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, troppca_core::fit(&pts, &config).unwrap());
    }
}
