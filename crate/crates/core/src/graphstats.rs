//! Small-world diagnostics: clustering, path lengths, degree histogram and
//! the clustering-vs-size scaling study.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::analysis::{linear_fit, LinearFit};
use crate::config::HierarchyConfig;
use crate::graph::{Graph, NodeId};
use crate::{netgen, rng, Error, Result};

/// `C_i = 2 E_i / (k_i (k_i - 1))`, with `C_i = 0` when `k_i <= 1`.
pub fn local_clustering(g: &Graph, i: NodeId) -> f64 {
    let mut marks = vec![false; g.node_count()];
    clustering_with_marks(g, i, &mut marks)
}

fn clustering_with_marks(g: &Graph, i: NodeId, marks: &mut [bool]) -> f64 {
    let nbrs = g.neighbors(i);
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    for &u in nbrs {
        marks[u] = true;
    }
    // each neighbor-neighbor link is seen from both ends
    let twice_links: usize = nbrs
        .iter()
        .map(|&u| g.neighbors(u).iter().filter(|&&w| marks[w]).count())
        .sum();
    for &u in nbrs {
        marks[u] = false;
    }
    twice_links as f64 / (k * (k - 1)) as f64
}

pub fn clustering_per_node(g: &Graph) -> Vec<f64> {
    let mut marks = vec![false; g.node_count()];
    (0..g.node_count()).map(|i| clustering_with_marks(g, i, &mut marks)).collect()
}

/// Mean of `C_i` over all nodes; low-degree nodes count as zero.
pub fn average_clustering(g: &Graph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    clustering_per_node(g).iter().sum::<f64>() / n as f64
}

/// `histogram[k]` is the number of nodes of degree `k`.
pub fn degree_histogram(g: &Graph) -> Vec<usize> {
    let max = (0..g.node_count()).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut hist = vec![0; max + 1];
    for v in 0..g.node_count() {
        hist[g.degree(v)] += 1;
    }
    hist
}

/// Connected-component label of every node, plus the component sizes.
pub fn components(g: &Graph) -> (Vec<usize>, Vec<usize>) {
    const UNSEEN: usize = usize::MAX;
    let n = g.node_count();
    let mut label = vec![UNSEEN; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != UNSEEN {
            continue;
        }
        let c = sizes.len();
        let mut size = 0;
        label[s] = c;
        stack.push(s);
        while let Some(v) = stack.pop() {
            size += 1;
            for &u in g.neighbors(v) {
                if label[u] == UNSEEN {
                    label[u] = c;
                    stack.push(u);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Reusable BFS buffers.
#[derive(Debug, Clone)]
pub struct BfsWorkspace {
    dist: Vec<u32>,
    queue: Vec<NodeId>,
}

impl BfsWorkspace {
    pub fn new(n: usize) -> Self {
        BfsWorkspace { dist: vec![u32::MAX; n], queue: Vec::with_capacity(n) }
    }
}

/// Distances from one source to everything it reaches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SourceSummary {
    pub distance_sum: u64,
    /// Nodes reached, excluding the source.
    pub reached: u64,
    pub eccentricity: u32,
}

pub fn bfs_from(g: &Graph, source: NodeId, ws: &mut BfsWorkspace) -> SourceSummary {
    ws.queue.clear();
    ws.queue.push(source);
    ws.dist[source] = 0;
    let mut head = 0;
    let mut summary = SourceSummary::default();
    while head < ws.queue.len() {
        let v = ws.queue[head];
        head += 1;
        let dv = ws.dist[v];
        summary.distance_sum += dv as u64;
        summary.eccentricity = summary.eccentricity.max(dv);
        for &u in g.neighbors(v) {
            if ws.dist[u] == u32::MAX {
                ws.dist[u] = dv + 1;
                ws.queue.push(u);
            }
        }
    }
    summary.reached = ws.queue.len() as u64 - 1;
    for &v in &ws.queue {
        ws.dist[v] = u32::MAX;
    }
    summary
}

/// Order-independent reduction of per-source BFS summaries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PathAccumulator {
    pub distance_sum: u64,
    pub ordered_pairs: u64,
    pub max_distance: u32,
    pub sources: usize,
}

impl PathAccumulator {
    pub fn add(&mut self, s: SourceSummary) {
        self.distance_sum += s.distance_sum;
        self.ordered_pairs += s.reached;
        self.max_distance = self.max_distance.max(s.eccentricity);
        self.sources += 1;
    }

    pub fn merge(mut self, other: PathAccumulator) -> PathAccumulator {
        self.distance_sum += other.distance_sum;
        self.ordered_pairs += other.ordered_pairs;
        self.max_distance = self.max_distance.max(other.max_distance);
        self.sources += other.sources;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMetrics {
    /// Mean shortest-path length over connected pairs (0 when there are none).
    pub avg_path_length: f64,
    /// Largest finite shortest-path length (a lower bound when sampled).
    pub diameter: usize,
    /// Unordered connected pairs, always exact.
    pub n_connected_pairs: u64,
    pub n_components: usize,
    /// Number of BFS sources when the estimate was sampled.
    pub sampled_sources: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathOptions {
    /// Graphs with more nodes than this use source sampling.
    pub sample_cutoff: usize,
    /// BFS sources drawn (without replacement) when sampling.
    pub sample_sources: usize,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { sample_cutoff: 20_000, sample_sources: 1_000 }
    }
}

/// BFS sources for `g` under `options`: all nodes, or a uniform sample.
pub fn choose_sources<R: Rng + ?Sized>(g: &Graph, options: &PathOptions, rng: &mut R) -> (Vec<NodeId>, bool) {
    let n = g.node_count();
    if n <= options.sample_cutoff || options.sample_sources >= n {
        ((0..n).collect(), false)
    } else {
        let mut picked = index::sample(rng, n, options.sample_sources.max(1)).into_vec();
        picked.sort_unstable();
        (picked, true)
    }
}

/// Turns an accumulated sweep into [`PathMetrics`].
pub fn finish_path_metrics(g: &Graph, acc: PathAccumulator, sampled: bool) -> PathMetrics {
    let (_, sizes) = components(g);
    let n_connected_pairs = sizes.iter().map(|&c| (c as u64) * (c as u64 - 1) / 2).sum();
    let avg_path_length = if acc.ordered_pairs == 0 {
        0.0
    } else {
        acc.distance_sum as f64 / acc.ordered_pairs as f64
    };
    PathMetrics {
        avg_path_length,
        diameter: acc.max_distance as usize,
        n_connected_pairs,
        n_components: sizes.len(),
        sampled_sources: sampled.then_some(acc.sources),
    }
}

/// Exact all-pairs metrics by BFS from every node.
pub fn path_metrics(g: &Graph) -> PathMetrics {
    let mut ws = BfsWorkspace::new(g.node_count());
    let mut acc = PathAccumulator::default();
    for s in 0..g.node_count() {
        acc.add(bfs_from(g, s, &mut ws));
    }
    finish_path_metrics(g, acc, false)
}

/// Path metrics with the sampling estimator above `options.sample_cutoff`.
pub fn path_metrics_with<R: Rng + ?Sized>(g: &Graph, options: &PathOptions, rng: &mut R) -> PathMetrics {
    let (sources, sampled) = choose_sources(g, options, rng);
    let mut ws = BfsWorkspace::new(g.node_count());
    let mut acc = PathAccumulator::default();
    for s in sources {
        acc.add(bfs_from(g, s, &mut ws));
    }
    finish_path_metrics(g, acc, sampled)
}

/// Everything reported in one row of the statistics table.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStatistics {
    pub n_nodes: usize,
    pub clustering_avg: f64,
    pub clustering_per_node: Vec<f64>,
    pub path: PathMetrics,
    pub degree_histogram: Vec<usize>,
}

impl GraphStatistics {
    pub fn from_parts(g: &Graph, path: PathMetrics) -> Self {
        let per_node = clustering_per_node(g);
        let n = g.node_count();
        let clustering_avg = if n == 0 { 0.0 } else { per_node.iter().sum::<f64>() / n as f64 };
        GraphStatistics {
            n_nodes: n,
            clustering_avg,
            clustering_per_node: per_node,
            path,
            degree_histogram: degree_histogram(g),
        }
    }
}

pub fn statistics<R: Rng + ?Sized>(g: &Graph, options: &PathOptions, rng: &mut R) -> GraphStatistics {
    GraphStatistics::from_parts(g, path_metrics_with(g, options, rng))
}

/// One size of the scaling study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub mean_clustering: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRow>,
    /// Least-squares line through `(ln N, ln C)`.
    pub fit: LinearFit,
}

impl ScalingStudy {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Seed of sample `sample` at grid position `size_index`.
pub fn scaling_seed(master: u64, size_index: usize, sample: usize) -> u64 {
    rng::derive_seed(rng::derive_seed(master, size_index as u64), sample as u64)
}

/// Fits `ln C = slope * ln N + b` over the rows.
pub fn fit_scaling(rows: Vec<ScalingRow>) -> Result<ScalingStudy> {
    if rows.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, found: rows.len() });
    }
    if rows.iter().any(|r| !(r.mean_clustering > 0.0)) {
        return Err(Error::DegenerateFit("clustering coefficient vanished"));
    }
    let xs: Vec<f64> = rows.iter().map(|r| libm::log(r.n as f64)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| libm::log(r.mean_clustering)).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(ScalingStudy { rows, fit })
}

/// Generates `seeds_per_n` networks per size from `template` (sizes replace
/// `n_total`, seeds derive from `template.seed`) and fits the log-log slope
/// of the mean clustering coefficient.
pub fn scaling_study(template: &HierarchyConfig, n_grid: &[usize], seeds_per_n: usize) -> Result<ScalingStudy> {
    if n_grid.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, found: n_grid.len() });
    }
    if seeds_per_n == 0 {
        return Err(Error::Domain("seeds_per_n must be positive"));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for (idx, &n) in n_grid.iter().enumerate() {
        let mut total = 0.0;
        for sample in 0..seeds_per_n {
            let cfg = HierarchyConfig { n_total: n, seed: scaling_seed(template.seed, idx, sample), ..template.clone() };
            total += average_clustering(netgen::generate(&cfg)?.graph());
        }
        rows.push(ScalingRow { n, mean_clustering: total / seeds_per_n as f64, samples: seeds_per_n });
    }
    fit_scaling(rows)
}

/// Uniform random graph with the same node and edge counts as `g`.
pub fn random_counterpart<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Graph {
    let n = g.node_count();
    let target = g.edge_count().min(n * n.saturating_sub(1) / 2);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(target);
    let mut seen = alloc::collections::BTreeSet::new();
    while edges.len() < target {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        if seen.insert(key) {
            edges.push(key);
        }
    }
    Graph::from_edges(n, edges)
}
