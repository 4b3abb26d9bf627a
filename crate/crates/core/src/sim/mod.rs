//! Round-synchronous message passing with per-edge bandwidth accounting.
//!
//! Every round each node reads the messages delivered to it, updates its
//! state and emits messages to neighbors. Messages emitted in round `t` are
//! visible in round `t + 1`. In strict mode every directed edge may carry at
//! most `bit_budget` bits per round; excess is recorded, never truncated.

pub mod forest;
pub mod link;
pub mod primitives;
pub mod stats;
pub mod virtual_graph;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use forest::{root_forest, RootedForest};
pub use link::{run_protocol, Frame};
pub use primitives::{aggregate, bfs_tree, elect_leader, Aggregate, BfsTree, SimMode};
pub use stats::{RoundStats, StatsLog, StatsRow};
pub use virtual_graph::{compress_virtual_graph, ContractRule, VirtualEdge, VirtualGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Anything that can travel over an edge. The bit length is what the
/// bandwidth accounting charges.
pub trait Payload {
    fn bit_len(&self) -> u64;
}

/// Bits needed to write a nonnegative integer below `bound` (at least 1).
pub fn bits_for(bound: u64) -> u64 {
    (64 - bound.leading_zeros() as u64).max(1)
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("adjacency is not symmetric: {0} lists {1} but not vice versa")]
    Asymmetric(NodeId, NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate neighbor {1} at node {0}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {0} out of range for a network of {1} nodes")]
    UnknownNode(usize, usize),
    #[error("round {round}: node {from} tried to send to non-neighbor {to}")]
    NotNeighbor { round: u64, from: NodeId, to: NodeId },
    #[error("state vector has {got} entries, network has {expected} nodes")]
    StateCount { got: usize, expected: usize },
    #[error("protocol did not quiesce within {0} rounds")]
    NoQuiescence(u64),
    #[error("forest input contains a cycle through edge {0}")]
    Cyclic(usize),
    #[error("two designated roots {0} and {1} lie in one tree")]
    TwoRoots(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetConfig {
    /// Multiplier in the default budget `c_b * ceil(log2 n)`.
    pub c_b: u64,
    /// Explicit per-edge budget overriding the default.
    pub bit_budget: Option<u64>,
    pub strict: bool,
    pub seed: u64,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig { c_b: 8, bit_budget: None, strict: false, seed: 0 }
    }
}

impl NetConfig {
    pub fn budget_for(&self, n: usize) -> u64 {
        self.bit_budget.unwrap_or_else(|| {
            let log = (n.max(2) as f64).log2().ceil() as u64;
            (self.c_b * log).max(1)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BudgetViolation {
    pub round: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub bits: u64,
}

#[derive(Debug, Clone)]
pub struct Envelope<M> {
    pub from: NodeId,
    pub msg: M,
}

/// Messages a node emits during one round.
#[derive(Debug)]
pub struct Outbox<M> {
    sends: Vec<(NodeId, M)>,
}

impl<M> Outbox<M> {
    fn new() -> Self {
        Outbox { sends: Vec::new() }
    }

    pub fn send(&mut self, to: NodeId, msg: M) {
        self.sends.push((to, msg));
    }

    pub fn is_empty(&self) -> bool {
        self.sends.is_empty()
    }
}

/// Per-round view a node has of itself.
pub struct NodeCtx<'a> {
    pub id: NodeId,
    pub round: u64,
    pub n: usize,
    pub neighbors: &'a [NodeId],
    pub rng: &'a mut ChaCha8Rng,
}

/// Messages in flight between two rounds.
#[derive(Debug, Clone)]
pub struct Mailbox<M> {
    inbox: Vec<Vec<Envelope<M>>>,
}

impl<M> Mailbox<M> {
    pub fn new(n: usize) -> Self {
        Mailbox { inbox: (0..n).map(|_| Vec::new()).collect() }
    }

    pub fn inbox(&self, v: NodeId) -> &[Envelope<M>] {
        &self.inbox[v.index()]
    }

    pub fn is_empty(&self) -> bool {
        self.inbox.iter().all(Vec::is_empty)
    }
}

#[derive(Debug, Clone)]
pub struct CongestNetwork {
    adjacency: Vec<Vec<NodeId>>,
    budget: u64,
    strict: bool,
    seed: u64,
    round: u64,
    stats: RoundStats,
    violations: Vec<BudgetViolation>,
    rngs: Vec<ChaCha8Rng>,
}

impl CongestNetwork {
    pub fn new(adjacency: Vec<Vec<usize>>, cfg: NetConfig) -> Result<Self, SimError> {
        let n = adjacency.len();
        let mut adj: Vec<Vec<NodeId>> = Vec::with_capacity(n);
        for (v, list) in adjacency.iter().enumerate() {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(SimError::DuplicateEdge(v.into(), w[0].into()));
                }
            }
            for &u in &sorted {
                if u >= n {
                    return Err(SimError::UnknownNode(u, n));
                }
                if u == v {
                    return Err(SimError::SelfLoop(v.into()));
                }
            }
            adj.push(sorted.into_iter().map(NodeId::from).collect());
        }
        for v in 0..n {
            for &u in &adj[v] {
                if adj[u.index()].binary_search(&NodeId::from(v)).is_err() {
                    return Err(SimError::Asymmetric(v.into(), u));
                }
            }
        }
        let rngs = (0..n)
            .map(|v| {
                let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
                r.set_stream(v as u64);
                r
            })
            .collect();
        Ok(CongestNetwork {
            adjacency: adj,
            budget: cfg.budget_for(n),
            strict: cfg.strict,
            seed: cfg.seed,
            round: 0,
            stats: RoundStats::default(),
            violations: Vec::new(),
            rngs,
        })
    }

    /// Builds the network from an undirected edge list; repeated edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], cfg: NetConfig) -> Result<Self, SimError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(SimError::UnknownNode(u.max(v), n));
            }
            if u == v {
                return Err(SimError::SelfLoop(u.into()));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self::new(adj, cfg)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn bit_budget(&self) -> u64 {
        self.budget
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn stats(&self) -> RoundStats {
        self.stats
    }

    pub fn violations(&self) -> &[BudgetViolation] {
        &self.violations
    }

    /// Accounts for rounds executed centrally by a fast-path computation.
    pub fn charge(&mut self, delta: &RoundStats) {
        self.round += delta.rounds_elapsed;
        self.stats.absorb(delta);
    }

    /// Advances every node by exactly one round.
    pub fn run_round<S, M, F>(
        &mut self,
        states: &mut [S],
        mailbox: &mut Mailbox<M>,
        mut step: F,
    ) -> Result<RoundStats, SimError>
    where
        M: Payload,
        F: FnMut(&mut NodeCtx<'_>, &mut S, &[Envelope<M>], &mut Outbox<M>),
    {
        let n = self.len();
        if states.len() != n {
            return Err(SimError::StateCount { got: states.len(), expected: n });
        }
        self.round += 1;
        let round = self.round;
        let mut next: Vec<Vec<Envelope<M>>> = (0..n).map(|_| Vec::new()).collect();
        let mut delta = RoundStats { rounds_elapsed: 1, ..RoundStats::default() };
        let mut edge_bits: Vec<(NodeId, u64)> = Vec::new();
        for v in 0..n {
            let inbox = std::mem::take(&mut mailbox.inbox[v]);
            let mut out = Outbox::new();
            let mut ctx = NodeCtx {
                id: v.into(),
                round,
                n,
                neighbors: &self.adjacency[v],
                rng: &mut self.rngs[v],
            };
            step(&mut ctx, &mut states[v], &inbox, &mut out);
            edge_bits.clear();
            for (to, msg) in out.sends {
                if self.adjacency[v].binary_search(&to).is_err() {
                    return Err(SimError::NotNeighbor { round, from: v.into(), to });
                }
                let bits = msg.bit_len();
                match edge_bits.iter_mut().find(|(u, _)| *u == to) {
                    Some(slot) => slot.1 += bits,
                    None => edge_bits.push((to, bits)),
                }
                delta.total_messages += 1;
                next[to.index()].push(Envelope { from: v.into(), msg });
            }
            for &(to, bits) in &edge_bits {
                delta.max_bits_on_any_edge_per_round = delta.max_bits_on_any_edge_per_round.max(bits);
                if self.strict && bits > self.budget {
                    delta.budget_violations += 1;
                    self.violations.push(BudgetViolation { round, from: v.into(), to, bits });
                }
            }
        }
        mailbox.inbox = next;
        self.stats.absorb(&delta);
        Ok(delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    struct Bits(u64);
    impl Payload for Bits {
        fn bit_len(&self) -> u64 {
            self.0
        }
    }

    #[test]
    fn ping_is_delivered_next_round() {
        let mut net = CongestNetwork::from_edges(2, &[(0, 1)], NetConfig::default()).unwrap();
        let mut states = vec![Vec::<NodeId>::new(); 2];
        let mut mb = Mailbox::new(2);
        net.run_round(&mut states, &mut mb, |ctx, _s, _inbox, out| {
            let peer = ctx.neighbors[0];
            out.send(peer, Bits(4));
        })
        .unwrap();
        net.run_round(&mut states, &mut mb, |_ctx, s, inbox, _out| {
            s.extend(inbox.iter().map(|e| e.from));
        })
        .unwrap();
        assert_eq!(states[0], vec![NodeId(1)]);
        assert_eq!(states[1], vec![NodeId(0)]);
    }

    #[test]
    fn silent_round_only_advances_counter() {
        let mut net = CongestNetwork::from_edges(3, &[(0, 1), (1, 2)], NetConfig::default()).unwrap();
        let mut states = vec![(); 3];
        let mut mb: Mailbox<Bits> = Mailbox::new(3);
        let before = net.stats();
        net.run_round(&mut states, &mut mb, |_, _, _, _| {}).unwrap();
        assert_eq!(net.stats().rounds_elapsed, before.rounds_elapsed + 1);
        assert_eq!(net.stats().total_messages, before.total_messages);
    }

    #[test]
    fn star_broadcast_over_budget_records_violations() {
        let edges: Vec<_> = (1..=5).map(|i| (0, i)).collect();
        let cfg = NetConfig { bit_budget: Some(32), strict: true, ..NetConfig::default() };
        let mut net = CongestNetwork::from_edges(6, &edges, cfg).unwrap();
        let mut states = vec![(); 6];
        let mut mb = Mailbox::new(6);
        net.run_round(&mut states, &mut mb, |ctx, _, _, out| {
            if ctx.id == NodeId(0) {
                for &u in ctx.neighbors {
                    out.send(u, Bits(64));
                }
            }
        })
        .unwrap();
        assert_eq!(net.stats().budget_violations, 5);
        assert_eq!(net.violations().len(), 5);
        assert!(net.violations().iter().all(|v| v.round == 1 && v.bits == 64));
    }

    #[test]
    fn sending_to_a_stranger_fails() {
        let mut net = CongestNetwork::from_edges(3, &[(0, 1), (1, 2)], NetConfig::default()).unwrap();
        let mut states = vec![(); 3];
        let mut mb = Mailbox::new(3);
        let err = net
            .run_round(&mut states, &mut mb, |ctx, _, _, out| {
                if ctx.id == NodeId(0) {
                    out.send(NodeId(2), Bits(1));
                }
            })
            .unwrap_err();
        assert!(matches!(err, SimError::NotNeighbor { .. }));
    }

    #[test]
    fn rejects_asymmetric_adjacency() {
        let err = CongestNetwork::new(vec![vec![1], vec![]], NetConfig::default()).unwrap_err();
        assert_eq!(err, SimError::Asymmetric(NodeId(0), NodeId(1)));
    }
}
