//! Construction of layered hierarchical networks.
//!
//! A network is built in two phases. [`allocate_layers`] grows the skeleton
//! (a rooted forest, one layer at a time, every son attached to a father in
//! the layer directly above). [`offer_shortcuts`] then walks every eligible
//! pair once and offers it a shortcut with the homophily kernel:
//!
//! * same layer: `c1 * exp(-alpha * x)`,
//! * across layers (`AllUpper`): `h(j) / H * exp(-alpha * x)`,
//! * across layers (`AncestorsOnly`): `h(j) / H`, ancestors only,
//!
//! where `x` is the social distance (height of the deepest common skeleton
//! ancestor), `h(d) = l - d + 1` is the height of layer `d` and
//! `H = l (l + 1) / 2`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::config::{Branching, CrossLayerRule, HierarchyConfig, Mode};
use crate::graph::{Graph, NodeId};
use crate::{rng, Error, Result};

/// The layered forest underlying a hierarchical network.
///
/// Layers are numbered from 1 (top) to `l` (bottom).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    parent: Vec<Option<NodeId>>,
    layer: Vec<usize>,
    children: Vec<Vec<NodeId>>,
    members: Vec<Vec<NodeId>>,
    /// `ancestors[v * n_layers + d - 1]` is the ancestor of `v` in layer `d`
    /// (`v` itself at its own layer); unused past `layer(v)`.
    ancestors: Vec<NodeId>,
}

impl Skeleton {
    /// Builds a skeleton from a parent table. Roots (`None`) form layer 1.
    pub fn from_parents(parent: Vec<Option<NodeId>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::Domain("skeleton needs at least one node"));
        }
        if parent.iter().flatten().any(|&p| p >= n) {
            return Err(Error::Domain("parent id out of range"));
        }
        // 0 = unknown; depth is resolved by walking up to the first known node.
        let mut layer = vec![0usize; n];
        let mut path = Vec::new();
        for v in 0..n {
            let mut cur = v;
            while layer[cur] == 0 {
                path.push(cur);
                if path.len() > n {
                    return Err(Error::Domain("parent table contains a cycle"));
                }
                match parent[cur] {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            let mut depth = if layer[cur] == 0 { 0 } else { layer[cur] };
            while let Some(u) = path.pop() {
                depth += 1;
                layer[u] = depth;
            }
        }
        let n_layers = layer.iter().copied().max().unwrap_or(1);
        let mut members = vec![Vec::new(); n_layers];
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            members[layer[v] - 1].push(v);
            if let Some(p) = parent[v] {
                children[p].push(v);
            }
        }
        let mut ancestors = vec![0; n * n_layers];
        for layer_nodes in &members {
            for &v in layer_nodes {
                let d = layer[v];
                let row = v * n_layers;
                if let Some(p) = parent[v] {
                    let prow = p * n_layers;
                    ancestors.copy_within(prow..prow + d - 1, row);
                }
                ancestors[row + d - 1] = v;
            }
        }
        Ok(Skeleton { parent, layer, children, members, ancestors })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Number of layers `l`.
    #[inline]
    pub fn n_layers(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn layer_of(&self, v: NodeId) -> usize {
        self.layer[v]
    }

    #[inline]
    pub fn parent_of(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn children_of(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    /// Members of layer `d` (1-based). Panics when `d` is out of range.
    pub fn layer_members(&self, d: usize) -> &[NodeId] {
        &self.members[d - 1]
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Height of layer `d`: `l - d + 1`.
    #[inline]
    pub fn height(&self, d: usize) -> usize {
        self.n_layers() + 1 - d
    }

    /// Sum of all layer heights, `l (l + 1) / 2`.
    #[inline]
    pub fn height_sum(&self) -> usize {
        let l = self.n_layers();
        l * (l + 1) / 2
    }

    /// Ancestor of `v` in layer `d <= layer_of(v)`.
    #[inline]
    pub fn ancestor_at(&self, v: NodeId, d: usize) -> NodeId {
        debug_assert!(d >= 1 && d <= self.layer[v]);
        self.ancestors[v * self.n_layers() + d - 1]
    }

    fn ancestor_row(&self, v: NodeId) -> &[NodeId] {
        let l = self.n_layers();
        &self.ancestors[v * l..v * l + self.layer[v]]
    }

    /// Whether `a` is a proper ancestor of `v`.
    pub fn is_ancestor(&self, a: NodeId, v: NodeId) -> bool {
        let da = self.layer[a];
        da < self.layer[v] && self.ancestor_at(v, da) == a
    }

    /// Layer of the deepest common ancestor of `i` and `j`, or `None` when they
    /// hang below different roots.
    pub fn common_ancestor_layer(&self, i: NodeId, j: NodeId) -> Option<usize> {
        common_prefix(self.ancestor_row(i), self.ancestor_row(j))
    }

    /// Social distance of two distinct nodes: the height of their deepest
    /// common ancestor, or `l + 1` (a virtual super-root) when there is none.
    pub fn social_distance(&self, i: NodeId, j: NodeId) -> Result<usize> {
        if i == j {
            return Err(Error::Domain("social distance of a node to itself"));
        }
        Ok(self.distance_unchecked(i, j))
    }

    #[inline]
    fn distance_unchecked(&self, i: NodeId, j: NodeId) -> usize {
        match self.common_ancestor_layer(i, j) {
            Some(d) => self.height(d),
            None => self.n_layers() + 1,
        }
    }

    /// Skeleton edges `(parent, child)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v)))
    }
}

/// Number of leading layers on which two ancestor rows agree.
#[inline]
fn common_prefix(a: &[NodeId], b: &[NodeId]) -> Option<usize> {
    let depth = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    (depth > 0).then_some(depth)
}

/// A layered skeleton together with its shortcut-augmented adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    skeleton: Skeleton,
    graph: Graph,
}

impl Network {
    /// Merges skeleton edges and `shortcuts` into one simple graph.
    pub fn new<I>(skeleton: Skeleton, shortcuts: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let graph = Graph::from_edges(skeleton.node_count(), skeleton.edges().chain(shortcuts));
        Network { skeleton, graph }
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.skeleton.node_count()
    }

    pub fn n_layers(&self) -> usize {
        self.skeleton.n_layers()
    }

    pub fn layer_members(&self, d: usize) -> &[NodeId] {
        self.skeleton.layer_members(d)
    }
}

/// Grows the layered skeleton.
///
/// The first layer gets a uniform size in `[1, first_layer_max]`. Each next
/// layer has capacity equal to the sum of its fathers' son allowances (`m`
/// each, or a rounded Gaussian draw); statistical mode draws its size
/// uniformly from `[1, capacity]`, propagation mode fills it completely. Sizes
/// are clamped to the number of nodes still unallocated. Every son picks a
/// father uniformly among fathers with spare allowance.
pub fn allocate_layers<R: Rng + ?Sized>(config: &HierarchyConfig, rng: &mut R) -> Result<Skeleton> {
    config.validate()?;
    let n = config.n_total;
    let first = rng.random_range(1..=config.first_layer_max()).min(n);
    let gaussian = match config.branching {
        Branching::Constant => None,
        Branching::GaussianRounded { mu, sigma } => Some(
            Normal::new(mu, sigma).map_err(|_| Error::Domain("invalid gaussian branching"))?,
        ),
    };

    let mut parent: Vec<Option<NodeId>> = vec![None; first];
    parent.reserve(n - first);
    let mut layer_start = 0;
    let mut layer_end = first;
    let mut open: Vec<(NodeId, usize)> = Vec::new();
    while parent.len() < n {
        open.clear();
        for father in layer_start..layer_end {
            let allowance = match &gaussian {
                None => config.m as usize,
                Some(normal) => libm::round(normal.sample(rng)).max(1.0) as usize,
            };
            open.push((father, allowance));
        }
        let capacity: usize = open.iter().map(|&(_, a)| a).sum();
        let n_left = n - parent.len();
        let size = match config.mode {
            Mode::Statistical => rng.random_range(1..=capacity),
            Mode::Propagation => capacity,
        }
        .min(n_left);

        if size == capacity {
            for &(father, allowance) in &open {
                parent.extend(core::iter::repeat_n(Some(father), allowance));
            }
        } else {
            for _ in 0..size {
                let slot = rng.random_range(0..open.len());
                let (father, remaining) = &mut open[slot];
                parent.push(Some(*father));
                *remaining -= 1;
                if *remaining == 0 {
                    open.swap_remove(slot);
                }
            }
        }
        layer_start = layer_end;
        layer_end = parent.len();
    }
    Skeleton::from_parents(parent)
}

/// Same-layer shortcut probability `c1 * exp(-alpha * x)`, clamped to `[0, 1]`.
pub fn intra_layer_probability(config: &HierarchyConfig, x: usize) -> f64 {
    (config.c1 * libm::exp(-config.alpha * x as f64)).clamp(0.0, 1.0)
}

/// Probability that node `k` links up to node `n` in a higher layer.
///
/// Fails when `n` is not strictly above `k`, or, under
/// [`CrossLayerRule::AncestorsOnly`], when `n` is not an ancestor of `k`.
pub fn cross_layer_probability(
    config: &HierarchyConfig,
    skeleton: &Skeleton,
    k: NodeId,
    n: NodeId,
) -> Result<f64> {
    let (dk, dn) = (skeleton.layer_of(k), skeleton.layer_of(n));
    if dn >= dk {
        return Err(Error::Domain("cross-layer target must lie in a higher layer"));
    }
    let weight = skeleton.height(dn) as f64 / skeleton.height_sum() as f64;
    let p = match config.cross_layer_rule {
        CrossLayerRule::AllUpper => {
            weight * libm::exp(-config.alpha * skeleton.distance_unchecked(k, n) as f64)
        }
        CrossLayerRule::AncestorsOnly => {
            if !skeleton.is_ancestor(n, k) {
                return Err(Error::Domain("target is not an ancestor"));
            }
            weight
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Probability lookup tables for one skeleton.
struct Kernel {
    /// Indexed by social distance `x` in `0..=l+1`.
    intra: Vec<f64>,
    /// `cross[(j - 1) * (l + 2) + x]` for a target in layer `j`.
    cross: Vec<f64>,
    stride: usize,
}

impl Kernel {
    fn new(config: &HierarchyConfig, skeleton: &Skeleton) -> Self {
        let l = skeleton.n_layers();
        let stride = l + 2;
        let intra = (0..stride).map(|x| intra_layer_probability(config, x)).collect();
        let total = skeleton.height_sum() as f64;
        let mut cross = vec![0.0; l * stride];
        for j in 1..=l {
            let weight = skeleton.height(j) as f64 / total;
            for x in 0..stride {
                let decay = match config.cross_layer_rule {
                    CrossLayerRule::AllUpper => libm::exp(-config.alpha * x as f64),
                    CrossLayerRule::AncestorsOnly => 1.0,
                };
                cross[(j - 1) * stride + x] = (weight * decay).clamp(0.0, 1.0);
            }
        }
        Kernel { intra, cross, stride }
    }
}

/// Calls `offer(u, v, p)` exactly once for every eligible shortcut pair.
///
/// Order: same-layer pairs layer by layer from the top, then cross-layer
/// pairs starting from the bottom layer, each node towards every upper layer
/// from the top down.
pub fn offer_shortcuts<F>(config: &HierarchyConfig, skeleton: &Skeleton, mut offer: F)
where
    F: FnMut(NodeId, NodeId, f64),
{
    let l = skeleton.n_layers();
    let kernel = Kernel::new(config, skeleton);
    let virtual_root = l + 1;

    for d in 1..=l {
        let members = skeleton.layer_members(d);
        for (a_idx, &a) in members.iter().enumerate() {
            let row_a = skeleton.ancestor_row(a);
            for &b in &members[a_idx + 1..] {
                let x = match common_prefix(row_a, skeleton.ancestor_row(b)) {
                    Some(depth) => skeleton.height(depth),
                    None => virtual_root,
                };
                offer(a, b, kernel.intra[x]);
            }
        }
    }

    for i in (2..=l).rev() {
        for &k in skeleton.layer_members(i) {
            let row_k = skeleton.ancestor_row(k);
            for j in 1..i {
                let table = &kernel.cross[(j - 1) * kernel.stride..j * kernel.stride];
                match config.cross_layer_rule {
                    CrossLayerRule::AllUpper => {
                        for &n in skeleton.layer_members(j) {
                            let x = match common_prefix(row_k, skeleton.ancestor_row(n)) {
                                Some(depth) => skeleton.height(depth),
                                None => virtual_root,
                            };
                            offer(k, n, table[x]);
                        }
                    }
                    CrossLayerRule::AncestorsOnly => {
                        let n = row_k[j - 1];
                        offer(k, n, table[skeleton.height(j)]);
                    }
                }
            }
        }
    }
}

/// One Bernoulli trial per eligible pair; returns the accepted shortcuts.
pub fn sample_shortcuts<R: Rng + ?Sized>(
    config: &HierarchyConfig,
    skeleton: &Skeleton,
    rng: &mut R,
) -> Vec<(NodeId, NodeId)> {
    let mut accepted = Vec::new();
    offer_shortcuts(config, skeleton, |u, v, p| {
        if rng.random::<f64>() < p {
            accepted.push((u, v));
        }
    });
    accepted
}

/// Generates a network from `config`, seeding the RNG from `config.seed`.
pub fn generate(config: &HierarchyConfig) -> Result<Network> {
    generate_with_rng(config, &mut rng::seeded(config.seed))
}

pub fn generate_with_rng<R: Rng + ?Sized>(config: &HierarchyConfig, rng: &mut R) -> Result<Network> {
    let skeleton = allocate_layers(config, rng)?;
    let shortcuts = sample_shortcuts(config, &skeleton, rng);
    Ok(Network::new(skeleton, shortcuts))
}
