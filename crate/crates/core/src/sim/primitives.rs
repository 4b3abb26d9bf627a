//! BFS trees, tree aggregation with broadcast, and leader election.
//!
//! Each primitive runs either as a genuine per-node protocol on the
//! simulator ([`SimMode::Faithful`]) or centrally while charging exactly the
//! rounds, frames and frame sizes the protocol would produce
//! ([`SimMode::FastPath`]).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::link::{frames_for, run_protocol};
use super::{bits_for, CongestNetwork, Envelope, NodeId, Payload, RoundStats, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SimMode {
    Faithful,
    #[default]
    FastPath,
}

const MAX_PROTOCOL_ROUNDS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<Option<u32>>,
    /// Tree children in increasing id order.
    pub children: Vec<Vec<usize>>,
}

impl BfsTree {
    pub fn reachable(&self, v: usize) -> bool {
        self.depth[v].is_some()
    }

    pub fn unreachable(&self) -> Vec<usize> {
        (0..self.depth.len()).filter(|&v| self.depth[v].is_none()).collect()
    }

    pub fn height(&self) -> u32 {
        self.depth.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Reached nodes ordered by decreasing depth, ties by id.
    pub fn bottom_up(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.depth.len()).filter(|&v| self.reachable(v)).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.depth[v]), v));
        order
    }

    fn from_parents(root: usize, parent: Vec<Option<usize>>, depth: Vec<Option<u32>>) -> Self {
        let mut children = vec![Vec::new(); parent.len()];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        BfsTree { root, parent, depth, children }
    }
}

#[derive(Debug, Clone, Copy)]
struct ExploreMsg {
    depth: u32,
    width: u64,
}

impl Payload for ExploreMsg {
    fn bit_len(&self) -> u64 {
        self.width
    }
}

/// Shortest-path tree from `root`; among equally deep candidates the parent
/// with the smallest id wins. Unreached nodes keep `depth == None`.
pub fn bfs_tree(net: &mut CongestNetwork, root: NodeId, mode: SimMode) -> Result<(BfsTree, RoundStats), SimError> {
    let n = net.len();
    if root.index() >= n {
        return Err(SimError::UnknownNode(root.index(), n));
    }
    let width = bits_for(n as u64);
    match mode {
        SimMode::Faithful => {
            let mut st: Vec<(Option<u32>, Option<usize>)> = vec![(None, None); n];
            let stats = run_protocol(net, &mut st, MAX_PROTOCOL_ROUNDS, |ctx, s, inbox: &[Envelope<ExploreMsg>], out| {
                let newly = if ctx.round == 1 && ctx.id == root {
                    s.0 = Some(0);
                    true
                } else if s.0.is_none() && !inbox.is_empty() {
                    let first = inbox.iter().min_by_key(|e| e.from).expect("non-empty inbox");
                    s.0 = Some(first.msg.depth + 1);
                    s.1 = Some(first.from.index());
                    true
                } else {
                    false
                };
                if newly {
                    let depth = s.0.expect("assigned above");
                    for &u in ctx.neighbors {
                        out.send(u, ExploreMsg { depth, width });
                    }
                }
            })?;
            let (depth, parent) = st.into_iter().unzip();
            Ok((BfsTree::from_parents(root.index(), parent, depth), stats))
        }
        SimMode::FastPath => {
            let mut depth = vec![None; n];
            let mut parent = vec![None; n];
            depth[root.index()] = Some(0u32);
            let mut queue = VecDeque::from([root.index()]);
            while let Some(v) = queue.pop_front() {
                for &u in net.neighbors(v.into()) {
                    let u = u.index();
                    if depth[u].is_none() {
                        depth[u] = Some(depth[v].unwrap() + 1);
                        queue.push_back(u);
                    }
                }
            }
            // Smallest-id parent among the previous layer, as in the protocol.
            for v in 0..n {
                if let Some(d) = depth[v] {
                    if d > 0 {
                        parent[v] = net
                            .neighbors(v.into())
                            .iter()
                            .map(|u| u.index())
                            .find(|&u| depth[u] == Some(d - 1));
                    }
                }
            }
            let tree = BfsTree::from_parents(root.index(), parent, depth);
            let k = frames_for(width, net.bit_budget(), net.is_strict());
            let reached: Vec<usize> = (0..n).filter(|&v| tree.reachable(v)).collect();
            let sends: u64 = reached.iter().map(|&v| net.neighbors(v.into()).len() as u64).sum();
            let stats = if sends == 0 {
                RoundStats::rounds(1)
            } else {
                RoundStats {
                    rounds_elapsed: 1 + (tree.height() as u64 + 1) * k,
                    max_bits_on_any_edge_per_round: frame_peak(width, net),
                    total_messages: sends * k,
                    budget_violations: 0,
                }
            };
            net.charge(&stats);
            Ok((tree, stats))
        }
    }
}

/// Largest frame a message of `bits` bits produces.
fn frame_peak(bits: u64, net: &CongestNetwork) -> u64 {
    if net.is_strict() {
        bits.min(net.bit_budget())
    } else {
        bits
    }
}

/// Values that can be combined along a tree. `combine` must be associative
/// and commutative; the protocol folds children in increasing id order so
/// that results are reproducible bit for bit.
pub trait Aggregate: Clone + Payload {
    fn combine(&mut self, other: &Self);
}

#[derive(Debug, Clone)]
enum AggMsg<A> {
    Up(A),
    Down(A),
}

impl<A: Payload> Payload for AggMsg<A> {
    fn bit_len(&self) -> u64 {
        match self {
            AggMsg::Up(a) | AggMsg::Down(a) => a.bit_len() + 1,
        }
    }
}

#[derive(Debug, Clone)]
struct AggState<A> {
    own: A,
    parts: Vec<(usize, A)>,
    sent: bool,
    result: Option<A>,
}

/// Convergecast to the tree root followed by a broadcast of the result.
/// Only nodes reached by the tree take part.
pub fn aggregate<A: Aggregate>(
    net: &mut CongestNetwork,
    tree: &BfsTree,
    values: Vec<A>,
    mode: SimMode,
) -> Result<(A, RoundStats), SimError> {
    let n = net.len();
    if values.len() != n {
        return Err(SimError::StateCount { got: values.len(), expected: n });
    }
    match mode {
        SimMode::Faithful => {
            let mut st: Vec<AggState<A>> = values
                .into_iter()
                .map(|own| AggState { own, parts: Vec::new(), sent: false, result: None })
                .collect();
            let stats = run_protocol(net, &mut st, MAX_PROTOCOL_ROUNDS, |ctx, s, inbox: &[Envelope<AggMsg<A>>], out| {
                let v = ctx.id.index();
                if !tree.reachable(v) {
                    return;
                }
                for e in inbox {
                    match &e.msg {
                        AggMsg::Up(a) => s.parts.push((e.from.index(), a.clone())),
                        AggMsg::Down(a) => {
                            s.result = Some(a.clone());
                            for &c in &tree.children[v] {
                                out.send(c.into(), AggMsg::Down(a.clone()));
                            }
                        }
                    }
                }
                if !s.sent && s.parts.len() == tree.children[v].len() {
                    s.sent = true;
                    s.parts.sort_by_key(|(c, _)| *c);
                    let mut acc = s.own.clone();
                    for (_, p) in &s.parts {
                        acc.combine(p);
                    }
                    match tree.parent[v] {
                        Some(p) => out.send(p.into(), AggMsg::Up(acc)),
                        None => {
                            for &c in &tree.children[v] {
                                out.send(c.into(), AggMsg::Down(acc.clone()));
                            }
                            s.result = Some(acc);
                        }
                    }
                }
            })?;
            let root_value = st[tree.root].result.clone().expect("root finished the convergecast");
            Ok((root_value, stats))
        }
        SimMode::FastPath => {
            let budget = net.bit_budget();
            let strict = net.is_strict();
            let mut partial: Vec<Option<A>> = vec![None; n];
            let mut ready = vec![0u64; n];
            let mut stats = RoundStats::default();
            for v in tree.bottom_up() {
                let mut acc = values[v].clone();
                let mut r = 1;
                for &c in &tree.children[v] {
                    let pc = partial[c].as_ref().expect("children are finished first");
                    acc.combine(pc);
                    let bits = pc.bit_len() + 1;
                    let k = frames_for(bits, budget, strict);
                    r = r.max(ready[c] + k);
                    stats.total_messages += k;
                    stats.max_bits_on_any_edge_per_round =
                        stats.max_bits_on_any_edge_per_round.max(frame_peak(bits, net));
                }
                ready[v] = r;
                partial[v] = Some(acc);
            }
            let result = partial[tree.root].take().expect("root is reachable");
            let down_bits = result.bit_len() + 1;
            let kd = frames_for(down_bits, budget, strict);
            let edges = (0..n).filter(|&v| tree.reachable(v) && tree.parent[v].is_some()).count() as u64;
            stats.rounds_elapsed = ready[tree.root] + tree.height() as u64 * kd;
            if edges > 0 {
                stats.total_messages += edges * kd;
                stats.max_bits_on_any_edge_per_round =
                    stats.max_bits_on_any_edge_per_round.max(frame_peak(down_bits, net));
            }
            net.charge(&stats);
            Ok((result, stats))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Label {
    value: u64,
    width: u64,
}

impl Payload for Label {
    fn bit_len(&self) -> u64 {
        self.width
    }
}

/// Max-label flooding. With `labels == None` node ids serve as labels.
/// Returns the node holding the maximum label in node 0's component.
pub fn elect_leader(
    net: &mut CongestNetwork,
    labels: Option<&[u64]>,
    mode: SimMode,
) -> Result<(NodeId, RoundStats), SimError> {
    let n = net.len();
    let labels: Vec<u64> = match labels {
        Some(l) if l.len() == n => l.to_vec(),
        Some(l) => return Err(SimError::StateCount { got: l.len(), expected: n }),
        None => (0..n as u64).collect(),
    };
    if n == 0 {
        return Err(SimError::UnknownNode(0, 0));
    }
    let width = bits_for(labels.iter().copied().max().unwrap_or(0));
    let single_frame = frames_for(width, net.bit_budget(), net.is_strict()) == 1;
    let owner = |lab: u64| NodeId::from(labels.iter().position(|&l| l == lab).expect("label exists"));
    if mode == SimMode::Faithful || !single_frame {
        // Multi-frame labels queue behind each other; the protocol itself is
        // the only faithful account of that, so the fast path defers to it.
        let mut st: Vec<u64> = labels.clone();
        let stats = run_protocol(net, &mut st, MAX_PROTOCOL_ROUNDS, |ctx, best, inbox: &[Envelope<Label>], out| {
            let incoming = inbox.iter().map(|e| e.msg.value).max();
            let changed = match incoming {
                Some(x) if x > *best => {
                    *best = x;
                    true
                }
                _ => ctx.round == 1,
            };
            if changed {
                for &u in ctx.neighbors {
                    out.send(u, Label { value: *best, width });
                }
            }
        })?;
        return Ok((owner(st[0]), stats));
    }
    let mut last_send = 1u64;
    let mut sends = 0u64;
    let mut best0 = labels[0];
    for v in 0..n {
        let deg = net.neighbors(v.into()).len() as u64;
        let mut dist = vec![u32::MAX; n];
        dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        let mut layer_max: Vec<u64> = vec![labels[v]];
        while let Some(x) = queue.pop_front() {
            for &u in net.neighbors(x.into()) {
                let u = u.index();
                if dist[u] == u32::MAX {
                    dist[u] = dist[x] + 1;
                    let d = dist[u] as usize;
                    if layer_max.len() <= d {
                        layer_max.push(0);
                    }
                    layer_max[d] = layer_max[d].max(labels[u]);
                    queue.push_back(u);
                }
            }
        }
        let mut running = labels[v];
        let mut updates = 0u64;
        for (d, &m) in layer_max.iter().enumerate().skip(1) {
            if m > running {
                running = m;
                updates += 1;
                last_send = last_send.max(d as u64 + 1);
            }
        }
        if v == 0 {
            best0 = running;
        }
        sends += deg * (1 + updates);
    }
    let stats = if sends == 0 {
        RoundStats::rounds(1)
    } else {
        RoundStats {
            rounds_elapsed: last_send + 1,
            max_bits_on_any_edge_per_round: frame_peak(width, net),
            total_messages: sends,
            budget_violations: 0,
        }
    };
    net.charge(&stats);
    Ok((owner(best0), stats))
}

/// Integer sum with a self-describing width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumU64(pub u64);

impl Payload for SumU64 {
    fn bit_len(&self) -> u64 {
        bits_for(self.0)
    }
}

impl Aggregate for SumU64 {
    fn combine(&mut self, other: &Self) {
        self.0 += other.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxU64(pub u64);

impl Payload for MaxU64 {
    fn bit_len(&self) -> u64 {
        bits_for(self.0)
    }
}

impl Aggregate for MaxU64 {
    fn combine(&mut self, other: &Self) {
        self.0 = self.0.max(other.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::NetConfig;

    fn path(n: usize) -> CongestNetwork {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        CongestNetwork::from_edges(n, &edges, NetConfig::default()).unwrap()
    }

    #[test]
    fn bfs_on_path_and_cycle() {
        for mode in [SimMode::Faithful, SimMode::FastPath] {
            let mut net = path(3);
            let (t, _) = bfs_tree(&mut net, NodeId(0), mode).unwrap();
            assert_eq!(t.depth, vec![Some(0), Some(1), Some(2)]);
            assert_eq!(t.parent[0], None);
            let mut c4 = CongestNetwork::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], NetConfig::default()).unwrap();
            for r in 0..4 {
                let (t, _) = bfs_tree(&mut c4, NodeId(r), mode).unwrap();
                assert_eq!(t.height(), 2);
            }
        }
    }

    #[test]
    fn sum_and_max_aggregate() {
        for mode in [SimMode::Faithful, SimMode::FastPath] {
            let mut net = path(6);
            let (t, _) = bfs_tree(&mut net, NodeId(2), mode).unwrap();
            let vals = (1..=6).map(SumU64).collect();
            let (s, _) = aggregate(&mut net, &t, vals, mode).unwrap();
            assert_eq!(s.0, 21);
            let mut tri = path(3);
            let (t, _) = bfs_tree(&mut tri, NodeId(0), mode).unwrap();
            let (m, _) = aggregate(&mut tri, &t, vec![MaxU64(3), MaxU64(9), MaxU64(2)], mode).unwrap();
            assert_eq!(m.0, 9);
        }
    }

    #[test]
    fn leader_is_max_label() {
        for mode in [SimMode::Faithful, SimMode::FastPath] {
            let mut net = path(3);
            let (l, _) = elect_leader(&mut net, Some(&[7, 2, 9]), mode).unwrap();
            assert_eq!(l, NodeId(2));
            let mut single = CongestNetwork::from_edges(1, &[], NetConfig::default()).unwrap();
            let (l, s) = elect_leader(&mut single, None, mode).unwrap();
            assert_eq!(l, NodeId(0));
            assert_eq!(s.rounds_elapsed, 1);
        }
    }
}
