//! Monte Carlo ensembles of spreading realizations on a fixed network.
//!
//! Realization `k` of an ensemble always draws from
//! [`rng::stream(master_seed, k)`](crate::rng::stream), so any partition of
//! the index range over workers, merged with [`NrHistogram::merge`], yields
//! the same histogram as a serial run.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use crate::config::HierarchyConfig;
use crate::graph::{Graph, NodeId};
use crate::netgen::{self, Network};
use crate::sir::{layer_nodes, SirState};
use crate::{rng, Error, Result};

/// Where the initial spreader is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seeding {
    UniformRandom,
    /// A uniformly chosen member of the given layer (1 = top).
    Layer(usize),
}

/// Candidate seed nodes.
#[derive(Debug, Clone, Copy)]
pub enum SeedPool<'a> {
    /// Every node `0..n`.
    All(usize),
    Nodes(&'a [NodeId]),
}

impl SeedPool<'_> {
    pub fn resolve(network: &Network, seeding: Seeding) -> Result<SeedPool<'_>> {
        match seeding {
            Seeding::UniformRandom => Ok(SeedPool::All(network.node_count())),
            Seeding::Layer(d) => layer_nodes(network, d).map(SeedPool::Nodes),
        }
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        match *self {
            SeedPool::All(n) => rng.random_range(0..n),
            SeedPool::Nodes(nodes) => nodes[rng.random_range(0..nodes.len())],
        }
    }
}

/// Frequency of the final refractory count `N_R` over realizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NrHistogram {
    /// `counts[k]` realizations ended with `N_R = k`, for `k` in `0..=N`.
    counts: Vec<u64>,
    n_realizations: u64,
}

impl NrHistogram {
    pub fn new(network_size: usize) -> Self {
        NrHistogram { counts: vec![0; network_size + 1], n_realizations: 0 }
    }

    /// Builds a histogram from raw `(N_R, count)` pairs.
    pub fn from_counts<I>(network_size: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, u64)>,
    {
        let mut h = NrHistogram::new(network_size);
        for (k, c) in entries {
            if k > network_size {
                return Err(Error::Domain("N_R exceeds the network size"));
            }
            h.counts[k] += c;
            h.n_realizations += c;
        }
        Ok(h)
    }

    pub fn record(&mut self, n_refractory: usize) {
        self.counts[n_refractory] += 1;
        self.n_realizations += 1;
    }

    /// Adds another partial histogram of the same network size.
    pub fn merge(&mut self, other: &NrHistogram) {
        assert_eq!(self.counts.len(), other.counts.len(), "histograms of different network sizes");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_realizations += other.n_realizations;
    }

    pub fn network_size(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn n_realizations(&self) -> u64 {
        self.n_realizations
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, n_refractory: usize) -> u64 {
        self.counts.get(n_refractory).copied().unwrap_or(0)
    }

    /// Normalized frequencies `f(N_R)`; all zero for an empty histogram.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.n_realizations.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn frequency(&self, n_refractory: usize) -> f64 {
        if self.n_realizations == 0 {
            0.0
        } else {
            self.count(n_refractory) as f64 / self.n_realizations as f64
        }
    }

    /// Non-empty bins as `(N_R, count)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c))
    }

    /// Fraction of realizations with `N_R < threshold`.
    pub fn mass_below(&self, threshold: usize) -> f64 {
        let below: u64 = self.counts.iter().take(threshold).sum();
        below as f64 / self.n_realizations.max(1) as f64
    }

    /// `r = <N_R> / N = N^-1 * sum_k k f(k)`.
    pub fn average_fraction(&self) -> Result<f64> {
        if self.n_realizations == 0 {
            return Err(Error::InsufficientData { needed: 1, found: 0 });
        }
        let weighted: f64 = self.counts.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum();
        Ok(weighted / self.n_realizations as f64 / self.network_size() as f64)
    }

    /// Sample standard error of `r`.
    pub fn fraction_standard_error(&self) -> f64 {
        let n = self.n_realizations as f64;
        if n < 2.0 {
            return 0.0;
        }
        let size = self.network_size() as f64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for (k, c) in self.nonzero() {
            let x = k as f64 / size;
            s1 += x * c as f64;
            s2 += x * x * c as f64;
        }
        let mean = s1 / n;
        let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
        libm::sqrt(var / n)
    }
}

/// `r` of a histogram; see [`NrHistogram::average_fraction`].
pub fn average_fraction(histogram: &NrHistogram) -> Result<f64> {
    histogram.average_fraction()
}

/// Runs realizations `indices` of the ensemble `master_seed` on `g`.
pub fn run_realizations(g: &Graph, pool: SeedPool<'_>, indices: Range<u64>, master_seed: u64) -> NrHistogram {
    let mut hist = NrHistogram::new(g.node_count());
    let mut state = SirState::new(g.node_count());
    for k in indices {
        let mut rng = rng::stream(master_seed, k);
        state.reset(pool.draw(&mut rng));
        let (n_r, _) = state.run_to_end(g, &mut rng);
        hist.record(n_r);
    }
    hist
}

/// `n_realizations` independent runs on `g` with seeds drawn from `pool`.
pub fn run_ensemble_on_graph(g: &Graph, pool: SeedPool<'_>, n_realizations: u64, master_seed: u64) -> Result<NrHistogram> {
    if n_realizations == 0 {
        return Err(Error::Domain("n_realizations must be positive"));
    }
    Ok(run_realizations(g, pool, 0..n_realizations, master_seed))
}

/// `n_realizations` independent runs on one fixed network.
pub fn run_ensemble(network: &Network, seeding: Seeding, n_realizations: u64, master_seed: u64) -> Result<NrHistogram> {
    let pool = SeedPool::resolve(network, seeding)?;
    run_ensemble_on_graph(network.graph(), pool, n_realizations, master_seed)
}

/// Like [`run_ensemble`] but builds a fresh network for every realization
/// (network seed derived from `config.seed` and the realization index).
pub fn run_ensemble_regenerating(
    config: &HierarchyConfig,
    seeding: Seeding,
    n_realizations: u64,
    master_seed: u64,
) -> Result<NrHistogram> {
    if n_realizations == 0 {
        return Err(Error::Domain("n_realizations must be positive"));
    }
    let mut hist = NrHistogram::new(config.n_total);
    for k in 0..n_realizations {
        let cfg = HierarchyConfig { seed: rng::derive_seed(config.seed, k), ..config.clone() };
        let network = netgen::generate(&cfg)?;
        let pool = match seeding {
            // shallower networks simply lack the deeper layers
            Seeding::Layer(d) if d > network.n_layers() => continue,
            _ => SeedPool::resolve(&network, seeding)?,
        };
        hist.merge(&run_realizations(network.graph(), pool, k..k + 1, master_seed));
    }
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerFraction {
    pub layer: usize,
    pub layer_size: usize,
    /// Average refractory fraction `r_d` for seeds in this layer.
    pub r: f64,
    pub realizations: u64,
    pub histogram: NrHistogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSweepResult {
    pub config: HierarchyConfig,
    pub master_seed: u64,
    pub layer_sizes: Vec<usize>,
    pub per_layer: Vec<LayerFraction>,
}

impl LayerSweepResult {
    /// Layer with the largest `r_d`.
    pub fn argmax_layer(&self) -> usize {
        self.per_layer
            .iter()
            .max_by(|a, b| a.r.total_cmp(&b.r))
            .map_or(0, |lf| lf.layer)
    }

    pub fn argmin_layer(&self) -> usize {
        self.per_layer
            .iter()
            .min_by(|a, b| a.r.total_cmp(&b.r))
            .map_or(0, |lf| lf.layer)
    }

    pub fn fractions(&self) -> Vec<f64> {
        self.per_layer.iter().map(|lf| lf.r).collect()
    }
}

/// Seed of the layer-`d` ensemble inside a sweep.
pub fn layer_master_seed(master_seed: u64, layer: usize) -> u64 {
    rng::derive_seed(master_seed, 0x1a7e_0000 + layer as u64)
}

/// Builds the sweep result from per-layer histograms (index `d - 1`).
pub fn assemble_sweep(
    config: &HierarchyConfig,
    network: &Network,
    master_seed: u64,
    histograms: Vec<NrHistogram>,
) -> Result<LayerSweepResult> {
    let mut per_layer = Vec::with_capacity(histograms.len());
    for (idx, histogram) in histograms.into_iter().enumerate() {
        let layer = idx + 1;
        per_layer.push(LayerFraction {
            layer,
            layer_size: network.layer_members(layer).len(),
            r: histogram.average_fraction()?,
            realizations: histogram.n_realizations(),
            histogram,
        });
    }
    Ok(LayerSweepResult {
        config: config.clone(),
        master_seed,
        layer_sizes: network.skeleton().layer_sizes(),
        per_layer,
    })
}

pub fn check_sweepable(network: &Network, n_per_layer: u64) -> Result<()> {
    if network.n_layers() < 2 {
        return Err(Error::Domain("layer sweep needs at least two layers"));
    }
    if n_per_layer == 0 {
        return Err(Error::Domain("n_realizations must be positive"));
    }
    Ok(())
}

/// Generates one network from `config` and runs a layer-seeded ensemble for
/// every layer on it.
pub fn layer_sweep(config: &HierarchyConfig, n_per_layer: u64, master_seed: u64) -> Result<LayerSweepResult> {
    let network = netgen::generate(config)?;
    layer_sweep_on(config, &network, n_per_layer, master_seed)
}

pub fn layer_sweep_on(
    config: &HierarchyConfig,
    network: &Network,
    n_per_layer: u64,
    master_seed: u64,
) -> Result<LayerSweepResult> {
    check_sweepable(network, n_per_layer)?;
    let histograms = (1..=network.n_layers())
        .map(|d| run_ensemble(network, Seeding::Layer(d), n_per_layer, layer_master_seed(master_seed, d)))
        .collect::<Result<Vec<_>>>()?;
    assemble_sweep(config, network, master_seed, histograms)
}
