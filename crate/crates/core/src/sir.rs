//! One realization of the susceptible / infected / refractory contact
//! process with unit spreading rate.
//!
//! Each step picks an infected node `i` uniformly, then one of its
//! neighbors `j` uniformly. A susceptible `j` becomes infected; otherwise `i`
//! becomes refractory. A node without neighbors turns refractory as soon as
//! it is picked. The run ends when nobody is infected.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{Graph, NodeId};
use crate::netgen::Network;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeState {
    Susceptible,
    Infected,
    Refractory,
}

/// Population counts after `t` contact steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryPoint {
    pub t: u64,
    pub susceptible: usize,
    pub infected: usize,
    pub refractory: usize,
}

/// What a single step changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// `spreader` passed the information to `target`.
    Infection { spreader: NodeId, target: NodeId },
    /// `node` stopped spreading.
    Stifling { node: NodeId },
}

/// Mutable state of a running realization.
#[derive(Debug, Clone)]
pub struct SirState {
    state: Vec<NodeState>,
    infected: Vec<NodeId>,
    /// Index of each infected node inside `infected`.
    slot: Vec<usize>,
    n_refractory: usize,
    step: u64,
}

impl SirState {
    pub fn new(n: usize) -> Self {
        SirState {
            state: vec![NodeState::Susceptible; n],
            infected: Vec::new(),
            slot: vec![usize::MAX; n],
            n_refractory: 0,
            step: 0,
        }
    }

    /// Everybody susceptible except `seed`, which is infected.
    pub fn reset(&mut self, seed: NodeId) {
        for &v in &self.infected {
            self.slot[v] = usize::MAX;
        }
        self.state.fill(NodeState::Susceptible);
        self.infected.clear();
        self.n_refractory = 0;
        self.step = 0;
        self.infect(seed);
    }

    fn infect(&mut self, v: NodeId) {
        self.state[v] = NodeState::Infected;
        self.slot[v] = self.infected.len();
        self.infected.push(v);
    }

    fn stifle(&mut self, v: NodeId) {
        let idx = self.slot[v];
        self.infected.swap_remove(idx);
        if let Some(&moved) = self.infected.get(idx) {
            self.slot[moved] = idx;
        }
        self.slot[v] = usize::MAX;
        self.state[v] = NodeState::Refractory;
        self.n_refractory += 1;
    }

    pub fn state_of(&self, v: NodeId) -> NodeState {
        self.state[v]
    }

    pub fn infected(&self) -> &[NodeId] {
        &self.infected
    }

    pub fn is_finished(&self) -> bool {
        self.infected.is_empty()
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn counts(&self) -> TrajectoryPoint {
        let n_i = self.infected.len();
        TrajectoryPoint {
            t: self.step,
            susceptible: self.state.len() - n_i - self.n_refractory,
            infected: n_i,
            refractory: self.n_refractory,
        }
    }

    /// Performs one contact. Returns `None` once no one is infected.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, g: &Graph, rng: &mut R) -> Option<Transition> {
        if self.infected.is_empty() {
            return None;
        }
        let i = self.infected[rng.random_range(0..self.infected.len())];
        let nbrs = g.neighbors(i);
        self.step += 1;
        if nbrs.is_empty() {
            self.stifle(i);
            return Some(Transition::Stifling { node: i });
        }
        let j = nbrs[rng.random_range(0..nbrs.len())];
        if self.state[j] == NodeState::Susceptible {
            self.infect(j);
            Some(Transition::Infection { spreader: i, target: j })
        } else {
            self.stifle(i);
            Some(Transition::Stifling { node: i })
        }
    }

    /// Runs to extinction without recording; returns `(N_R, T)`.
    pub fn run_to_end<R: Rng + ?Sized>(&mut self, g: &Graph, rng: &mut R) -> (usize, u64) {
        while self.step(g, rng).is_some() {}
        (self.n_refractory, self.step)
    }
}

/// Result of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SirOutcome {
    /// Counts at `t = 0` and after every step.
    pub trajectory: Vec<TrajectoryPoint>,
    /// Final number of refractory nodes `N_R`.
    pub n_refractory: usize,
    /// Information lifetime `T` in contact steps.
    pub lifetime: u64,
    pub seed_node: NodeId,
    /// Layer of the seed when run on a layered network.
    pub seed_layer: Option<usize>,
}

impl SirOutcome {
    pub fn final_fraction(&self) -> f64 {
        let n = self.trajectory.first().map_or(0, |p| p.susceptible + p.infected + p.refractory);
        self.n_refractory as f64 / n as f64
    }
}

/// Runs one realization from `seed_node`, recording the full trajectory.
pub fn run<R: Rng + ?Sized>(g: &Graph, seed_node: NodeId, rng: &mut R) -> SirOutcome {
    assert!(seed_node < g.node_count(), "seed node {seed_node} is not in the graph");
    let mut state = SirState::new(g.node_count());
    state.reset(seed_node);
    let mut trajectory = vec![state.counts()];
    while state.step(g, rng).is_some() {
        trajectory.push(state.counts());
    }
    SirOutcome {
        trajectory,
        n_refractory: state.n_refractory,
        lifetime: state.step,
        seed_node,
        seed_layer: None,
    }
}

/// Seeds a uniformly chosen member of layer `layer` and runs one realization.
pub fn run_with_layer_seed<R: Rng + ?Sized>(network: &Network, layer: usize, rng: &mut R) -> Result<SirOutcome> {
    let seed = pick_layer_seed(network, layer, rng)?;
    let mut outcome = run(network.graph(), seed, rng);
    outcome.seed_layer = Some(layer);
    Ok(outcome)
}

pub(crate) fn layer_nodes(network: &Network, layer: usize) -> Result<&[NodeId]> {
    let n_layers = network.n_layers();
    if layer == 0 || layer > n_layers {
        return Err(Error::LayerOutOfRange { layer, n_layers });
    }
    let members = network.layer_members(layer);
    if members.is_empty() {
        return Err(Error::EmptyLayer(layer));
    }
    Ok(members)
}

fn pick_layer_seed<R: Rng + ?Sized>(network: &Network, layer: usize, rng: &mut R) -> Result<NodeId> {
    let members = layer_nodes(network, layer)?;
    Ok(members[rng.random_range(0..members.len())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::Skeleton;
    use crate::rng;

    #[test]
    fn isolated_seed_stops_at_once() {
        let g = Graph::empty(3);
        let out = run(&g, 1, &mut rng::seeded(0));
        assert_eq!((out.n_refractory, out.lifetime), (1, 1));
        assert_eq!(out.trajectory.len(), 2);
    }

    #[test]
    fn two_nodes_always_end_refractory() {
        // Step 1 infects the partner; step 2 stifles whichever spreader is
        // picked; step 3 stifles the other. No other path exists.
        let g = Graph::from_edges(2, [(0, 1)]);
        for seed in 0..200 {
            let out = run(&g, (seed % 2) as usize, &mut rng::seeded(seed));
            assert_eq!(out.n_refractory, 2);
            assert_eq!(out.lifetime, 3);
        }
    }

    #[test]
    fn lifetime_counts_state_changes() {
        let g = Graph::complete(30);
        for seed in 0..50 {
            let out = run(&g, 0, &mut rng::seeded(seed));
            assert_eq!(out.lifetime, 2 * out.n_refractory as u64 - 1);
            let last = out.trajectory.last().unwrap();
            assert_eq!(last.infected, 0);
            assert_eq!(last.refractory, out.n_refractory);
        }
    }

    #[test]
    fn single_root_layer_seeds_deterministically() {
        let skeleton = Skeleton::from_parents(vec![None, Some(0), Some(0)]).unwrap();
        let net = Network::new(skeleton, []);
        for seed in 0..10 {
            let out = run_with_layer_seed(&net, 1, &mut rng::seeded(seed)).unwrap();
            assert_eq!(out.seed_node, 0);
            assert_eq!(out.seed_layer, Some(1));
        }
        assert!(matches!(
            run_with_layer_seed(&net, 3, &mut rng::seeded(0)),
            Err(Error::LayerOutOfRange { layer: 3, n_layers: 2 })
        ));
        assert!(run_with_layer_seed(&net, 0, &mut rng::seeded(0)).is_err());
    }
}
