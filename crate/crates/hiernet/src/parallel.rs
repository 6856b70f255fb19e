//! Multi-threaded versions of the ensemble, path-length and scaling drivers.
//!
//! Work is split into fixed index ranges and merged in index order, so every
//! function returns exactly what its sequential counterpart in
//! `hiernet_core` returns, whatever the thread count.

use rayon::prelude::*;

use hiernet_core::ensemble::{self, SeedPool};
use hiernet_core::graphstats::{self, BfsWorkspace, PathAccumulator, PathOptions, ScalingRow, ScalingStudy};
use hiernet_core::{netgen, rng, Error, Graph, GraphStatistics, HierarchyConfig, LayerSweepResult, Network, NrHistogram, PathMetrics, Seeding};

/// Realizations per work item.
const CHUNK: u64 = 128;
/// BFS sources per work item.
const SOURCE_CHUNK: usize = 64;

pub fn run_ensemble_on_graph(
    g: &Graph,
    pool: SeedPool<'_>,
    n_realizations: u64,
    master_seed: u64,
) -> hiernet_core::Result<NrHistogram> {
    if n_realizations == 0 {
        return Err(Error::Domain("n_realizations must be positive"));
    }
    let n_chunks = n_realizations.div_ceil(CHUNK);
    Ok((0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let range = c * CHUNK..((c + 1) * CHUNK).min(n_realizations);
            ensemble::run_realizations(g, pool, range, master_seed)
        })
        .reduce(
            || NrHistogram::new(g.node_count()),
            |mut a, b| {
                a.merge(&b);
                a
            },
        ))
}

pub fn run_ensemble(
    network: &Network,
    seeding: Seeding,
    n_realizations: u64,
    master_seed: u64,
) -> hiernet_core::Result<NrHistogram> {
    let pool = SeedPool::resolve(network, seeding)?;
    run_ensemble_on_graph(network.graph(), pool, n_realizations, master_seed)
}

/// Parallel [`ensemble::run_ensemble_regenerating`].
pub fn run_ensemble_regenerating(
    config: &HierarchyConfig,
    seeding: Seeding,
    n_realizations: u64,
    master_seed: u64,
) -> hiernet_core::Result<NrHistogram> {
    if n_realizations == 0 {
        return Err(Error::Domain("n_realizations must be positive"));
    }
    let parts = (0..n_realizations)
        .into_par_iter()
        .map(|k| {
            let cfg = HierarchyConfig { seed: rng::derive_seed(config.seed, k), ..config.clone() };
            let network = netgen::generate(&cfg)?;
            let pool = match seeding {
                Seeding::Layer(d) if d > network.n_layers() => return Ok(None),
                _ => SeedPool::resolve(&network, seeding)?,
            };
            Ok(Some(ensemble::run_realizations(network.graph(), pool, k..k + 1, master_seed)))
        })
        .collect::<hiernet_core::Result<Vec<_>>>()?;
    let mut hist = NrHistogram::new(config.n_total);
    for part in parts.iter().flatten() {
        hist.merge(part);
    }
    Ok(hist)
}

pub fn layer_sweep_on(
    config: &HierarchyConfig,
    network: &Network,
    n_per_layer: u64,
    master_seed: u64,
) -> hiernet_core::Result<LayerSweepResult> {
    ensemble::check_sweepable(network, n_per_layer)?;
    let histograms = (1..=network.n_layers())
        .map(|d| run_ensemble(network, Seeding::Layer(d), n_per_layer, ensemble::layer_master_seed(master_seed, d)))
        .collect::<hiernet_core::Result<Vec<_>>>()?;
    ensemble::assemble_sweep(config, network, master_seed, histograms)
}

pub fn layer_sweep(config: &HierarchyConfig, n_per_layer: u64, master_seed: u64) -> hiernet_core::Result<LayerSweepResult> {
    let network = netgen::generate(config)?;
    layer_sweep_on(config, &network, n_per_layer, master_seed)
}

fn accumulate(g: &Graph, sources: &[usize]) -> PathAccumulator {
    sources
        .par_chunks(SOURCE_CHUNK)
        .map_init(
            || BfsWorkspace::new(g.node_count()),
            |ws, chunk| {
                let mut acc = PathAccumulator::default();
                for &s in chunk {
                    acc.add(graphstats::bfs_from(g, s, ws));
                }
                acc
            },
        )
        .reduce(PathAccumulator::default, PathAccumulator::merge)
}

/// Exact all-pairs metrics.
pub fn path_metrics(g: &Graph) -> PathMetrics {
    let sources: Vec<usize> = (0..g.node_count()).collect();
    graphstats::finish_path_metrics(g, accumulate(g, &sources), false)
}

/// Path metrics, sampling BFS sources (drawn from `sample_seed`) on large
/// graphs.
pub fn path_metrics_with(g: &Graph, options: &PathOptions, sample_seed: u64) -> PathMetrics {
    let (sources, sampled) = graphstats::choose_sources(g, options, &mut rng::seeded(sample_seed));
    graphstats::finish_path_metrics(g, accumulate(g, &sources), sampled)
}

pub fn statistics(g: &Graph, options: &PathOptions, sample_seed: u64) -> GraphStatistics {
    GraphStatistics::from_parts(g, path_metrics_with(g, options, sample_seed))
}

/// Parallel [`graphstats::scaling_study`].
pub fn scaling_study(template: &HierarchyConfig, n_grid: &[usize], seeds_per_n: usize) -> hiernet_core::Result<ScalingStudy> {
    if n_grid.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, found: n_grid.len() });
    }
    if seeds_per_n == 0 {
        return Err(Error::Domain("seeds_per_n must be positive"));
    }
    let jobs: Vec<(usize, usize)> = (0..n_grid.len()).flat_map(|i| (0..seeds_per_n).map(move |s| (i, s))).collect();
    let values = jobs
        .par_iter()
        .map(|&(idx, sample)| {
            let cfg = HierarchyConfig {
                n_total: n_grid[idx],
                seed: graphstats::scaling_seed(template.seed, idx, sample),
                ..template.clone()
            };
            Ok(graphstats::average_clustering(netgen::generate(&cfg)?.graph()))
        })
        .collect::<hiernet_core::Result<Vec<f64>>>()?;
    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(idx, &n)| {
            let total: f64 = values[idx * seeds_per_n..(idx + 1) * seeds_per_n].iter().sum();
            ScalingRow { n, mean_clustering: total / seeds_per_n as f64, samples: seeds_per_n }
        })
        .collect();
    graphstats::fit_scaling(rows)
}
