//! Degree-preserving cycle rounding.
//!
//! [`round_cycles`] repeatedly takes the fractional edges, strips them to
//! their 2-core, contracts odd degree-two paths into virtual edges, clusters
//! with [`ldd`], and inside each cluster removes a [`t_join`] and splits the
//! even remainder into cycles ([`cycle_decompose`]). Every cycle moves
//! weight alternately up and down until one edge hits a bound. Weighted
//! degrees never change, and the loop ends when the fractional edges form a
//! forest.
//!
//! Round counts here are charged from the structure of each phase (rake
//! layers, cluster radii, cycle lengths), not produced by the simulator.

pub mod euler;
pub mod format;
pub mod ldd;
pub mod tjoin;

use std::collections::VecDeque;

use num::{BigRational, One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::bits_for;
use crate::sim::stats::{RoundStats, StatsLog};
use crate::sim::virtual_graph::{compress_virtual_graph, ContractRule};

pub use euler::cycle_decompose;
pub use format::{parse_graph, write_graph};
pub use ldd::{ldd, LddClustering};
pub use tjoin::t_join;

#[derive(Debug, Error, PartialEq)]
pub enum RoundingError {
    #[error("edge {edge}: weight {weight} outside [0, {cap}]")]
    WeightOutOfRange { edge: usize, weight: String, cap: String },
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {edge} endpoint {vertex} is not below n = {n}")]
    BadVertex { edge: usize, vertex: usize, n: usize },
    #[error("graph is not bipartite (odd cycle through vertex {0})")]
    NotBipartite(usize),
    #[error("vertex {0} has odd degree")]
    OddDegree(usize),
    #[error("component rooted at {component_root} holds an odd number of terminals")]
    OddTerminals { component_root: usize },
    #[error("cycle of odd length {0}")]
    OddCycle(usize),
    #[error("cycle edges are not consecutive at position {0}")]
    BrokenCycle(usize),
    #[error("cycle edge {0} is already integral")]
    IntegralCycleEdge(usize),
    #[error("weight and edge counts differ")]
    LengthMismatch,
    #[error("no progress after {0} iterations")]
    NoProgress(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Edge weights with a notion of being at a bound.
pub trait Weight: Clone + PartialOrd + std::fmt::Debug + std::fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    /// Within tolerance of `0` or `cap`.
    fn is_integral(&self, cap: &Self) -> bool;
    /// Moves a value within tolerance of a bound onto it.
    fn snap(self, cap: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// Encoded size in bits.
    fn bits(&self) -> u64;
}

/// Float tolerance for integrality.
pub const FLOAT_TAU: f64 = 1e-9;

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn is_integral(&self, cap: &Self) -> bool {
        *self <= FLOAT_TAU || cap - self <= FLOAT_TAU
    }
    fn snap(self, cap: &Self) -> Self {
        if self <= FLOAT_TAU {
            0.0
        } else if cap - self <= FLOAT_TAU {
            *cap
        } else {
            self
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn bits(&self) -> u64 {
        64
    }
}

impl Weight for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn is_integral(&self, cap: &Self) -> bool {
        self.is_zero() || self == cap
    }
    fn snap(self, _cap: &Self) -> Self {
        self
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph<W> {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub w: Vec<W>,
    pub cap: Vec<W>,
}

fn odd_cycle_vertex(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let cu = color[u].unwrap();
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        q.push_back(v);
                    }
                    Some(cv) if cv == cu => return Some(v),
                    _ => {}
                }
            }
        }
    }
    None
}

impl<W: Weight> WeightedGraph<W> {
    /// Validates ranges, endpoints, and bipartiteness.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, w: Vec<W>, cap: Vec<W>) -> Result<Self, RoundingError> {
        if w.len() != edges.len() || cap.len() != edges.len() {
            return Err(RoundingError::LengthMismatch);
        }
        for (id, &(a, b)) in edges.iter().enumerate() {
            if a == b {
                return Err(RoundingError::SelfLoop(id));
            }
            for x in [a, b] {
                if x >= n {
                    return Err(RoundingError::BadVertex { edge: id, vertex: x, n });
                }
            }
            if w[id] < W::zero() || w[id] > cap[id] {
                return Err(RoundingError::WeightOutOfRange { edge: id, weight: w[id].to_string(), cap: cap[id].to_string() });
            }
        }
        if let Some(v) = odd_cycle_vertex(n, &edges) {
            return Err(RoundingError::NotBipartite(v));
        }
        Ok(WeightedGraph { n, edges, w, cap })
    }

    /// All caps equal to one.
    pub fn unit(n: usize, edges: Vec<(usize, usize)>, w: Vec<W>) -> Result<Self, RoundingError> {
        let cap = vec![W::one(); edges.len()];
        Self::new(n, edges, w, cap)
    }

    pub fn is_fractional(&self, e: usize) -> bool {
        !self.w[e].is_integral(&self.cap[e])
    }

    pub fn fractional_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.is_fractional(e)).collect()
    }

    /// Weighted degree per vertex.
    pub fn degree_sums(&self) -> Vec<W> {
        degree_sums(self.n, &self.edges, &self.w)
    }
}

pub fn degree_sums<W: Weight>(n: usize, edges: &[(usize, usize)], w: &[W]) -> Vec<W> {
    let mut s = vec![W::zero(); n];
    for (id, &(a, b)) in edges.iter().enumerate() {
        s[a] = s[a].plus(&w[id]);
        s[b] = s[b].plus(&w[id]);
    }
    s
}

/// Whether the listed edges contain a cycle (union-find).
pub fn has_cycle(n: usize, edges: &[(usize, usize)], subset: impl IntoIterator<Item = usize>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in subset {
        let (a, b) = edges[e];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return true;
        }
        parent[ra] = rb;
    }
    false
}

/// One cycle position: base edges with their sign when the position moves
/// up. A direct edge is `[(e, true)]`; a contracted odd path alternates
/// starting and ending with `true`.
type Element = Vec<(usize, bool)>;

fn room<W: Weight>(w: &W, cap: &W, up: bool) -> W {
    if up { cap.minus(w) } else { w.clone() }
}

/// Shifts weight around a cycle of elements; returns the amount moved.
fn rotate<W: Weight>(cycle: &[Element], w: &mut [W], cap: &[W]) -> W {
    debug_assert!(cycle.len() % 2 == 0);
    let delta_for = |first_up: bool| -> W {
        let mut best: Option<W> = None;
        for (k, elem) in cycle.iter().enumerate() {
            for &(e, s) in elem {
                let up = s == ((k % 2 == 0) == first_up);
                let r = room(&w[e], &cap[e], up);
                if best.as_ref().is_none_or(|b| r < *b) {
                    best = Some(r);
                }
            }
        }
        best.expect("nonempty cycle")
    };
    let (da, db) = (delta_for(true), delta_for(false));
    // Move the smaller amount; on a tie increase the lowest edge id.
    let first_up = if da < db {
        true
    } else if db < da {
        false
    } else {
        let (k, s) = cycle
            .iter()
            .enumerate()
            .flat_map(|(k, elem)| elem.iter().map(move |&(e, s)| (e, k, s)))
            .min()
            .map(|(_, k, s)| (k, s))
            .unwrap();
        s == (k % 2 == 0)
    };
    let delta = if first_up { da } else { db };
    for (k, elem) in cycle.iter().enumerate() {
        for &(e, s) in elem {
            let up = s == ((k % 2 == 0) == first_up);
            let v = if up { w[e].plus(&delta) } else { w[e].minus(&delta) };
            w[e] = v.snap(&cap[e]);
        }
    }
    delta
}

/// Rounds one even cycle given as consecutive edge ids: alternately adds
/// and subtracts `δ*`, the smaller of the two orientations' largest steps,
/// so at least one edge reaches a bound. Returns `δ*`.
pub fn round_single_cycle<W: Weight>(
    edges: &[(usize, usize)],
    cycle: &[usize],
    w: &mut [W],
    cap: &[W],
) -> Result<W, RoundingError> {
    let len = cycle.len();
    if len % 2 == 1 {
        return Err(RoundingError::OddCycle(len));
    }
    if len == 0 {
        return Ok(W::zero());
    }
    if let Some(&e) = cycle.iter().find(|&&e| w[e].is_integral(&cap[e])) {
        return Err(RoundingError::IntegralCycleEdge(e));
    }
    let (a, b) = edges[cycle[0]];
    let start = if len > 1 && (edges[cycle[1]].0 == a || edges[cycle[1]].1 == a) && edges[cycle[1]] != edges[cycle[0]] {
        b
    } else {
        a
    };
    let mut cur = start;
    for (k, &e) in cycle.iter().enumerate() {
        let (x, y) = edges[e];
        cur = if x == cur {
            y
        } else if y == cur {
            x
        } else {
            return Err(RoundingError::BrokenCycle(k));
        };
    }
    if cur != start {
        return Err(RoundingError::BrokenCycle(len - 1));
    }
    let elems: Vec<Element> = cycle.iter().map(|&e| vec![(e, true)]).collect();
    Ok(rotate(&elems, w, cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundingConfig {
    pub seed: u64,
    pub beta: f64,
    /// Fresh LDD draws per iteration before falling back to components.
    pub ldd_attempts: usize,
    /// Base rounds charged per virtual-graph round; `None` charges
    /// `⌈√n⌉ + D̃` with `D̃` twice the largest BFS eccentricity seen from
    /// each component's lowest vertex.
    pub virtual_round_cost: Option<u64>,
    pub max_iterations: Option<usize>,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        RoundingConfig { seed: 0, beta: 0.1, ldd_attempts: 8, virtual_round_cost: None, max_iterations: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub fractional_before: usize,
    pub core_nodes: usize,
    pub core_edges: usize,
    pub virtual_nodes: usize,
    pub virtual_edges: usize,
    /// Whether `m' ≥ 6n'/5` held on the contracted graph.
    pub dense_enough: bool,
    pub clusters: usize,
    pub cut_edges: usize,
    pub ldd_attempts: usize,
    pub ldd_fallback: bool,
    pub cycles: usize,
    pub fractional_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rounded<W> {
    pub w: Vec<W>,
    pub iterations: Vec<IterationReport>,
    pub cycles_rounded: usize,
    pub stats: StatsLog,
    pub total: RoundStats,
}

pub(crate) fn eccentricity_estimate(n: usize, edges: &[(usize, usize)]) -> u64 {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; n];
    let mut ecc = 0;
    for s in 0..n {
        if dist[s] != usize::MAX {
            continue;
        }
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            ecc = ecc.max(dist[u]);
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
    }
    2 * ecc as u64
}

/// Peels vertices of degree at most one, layer by layer. Returns the
/// surviving edge ids and the number of layers.
fn two_core(n: usize, edges: &[(usize, usize)], live: &[usize]) -> (Vec<usize>, u64) {
    let mut deg = vec![0usize; n];
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &e in live {
        let (a, b) = edges[e];
        deg[a] += 1;
        deg[b] += 1;
        inc[a].push(e);
        inc[b].push(e);
    }
    let mut removed_edge = vec![false; edges.len()];
    let mut gone = vec![false; n];
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    let mut layers = 0;
    while !layer.is_empty() {
        layers += 1;
        let mut next = Vec::new();
        for &v in &layer {
            gone[v] = true;
        }
        for &v in &layer {
            for &e in &inc[v] {
                if removed_edge[e] {
                    continue;
                }
                removed_edge[e] = true;
                let (a, b) = edges[e];
                let u = if a == v { b } else { a };
                deg[u] -= 1;
                deg[v] -= 1;
                if !gone[u] && deg[u] == 1 {
                    next.push(u);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        next.retain(|&u| !gone[u] && deg[u] <= 1);
        layer = next;
    }
    (live.iter().copied().filter(|&e| !removed_edge[e]).collect(), layers)
}

/// Rounds until the fractional edges form a forest, preserving every
/// vertex's weighted degree.
pub fn round_cycles<W: Weight>(g: &WeightedGraph<W>, cfg: &RoundingConfig, run_id: &str) -> Result<Rounded<W>, RoundingError> {
    let n = g.n;
    let mut w = g.w.clone();
    let cap = &g.cap;
    for e in 0..w.len() {
        w[e] = w[e].clone().snap(&cap[e]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vcost = cfg
        .virtual_round_cost
        .unwrap_or_else(|| (n.max(1) as f64).sqrt().ceil() as u64 + eccentricity_estimate(n, &g.edges))
        .max(1);
    let id_bits = bits_for(n as u64);
    let mut stats = StatsLog::default();
    let mut iterations = Vec::new();
    let mut cycles_rounded = 0;
    let limit = cfg.max_iterations.unwrap_or(g.edges.len() + 1);
    loop {
        let frac: Vec<usize> = (0..g.edges.len()).filter(|&e| !w[e].is_integral(&cap[e])).collect();
        let (core, layers) = two_core(n, &g.edges, &frac);
        let mut charge = |phase: &str, rounds: u64, bits: u64, messages: u64| {
            let s = RoundStats { rounds_elapsed: rounds, max_bits_on_any_edge_per_round: bits, total_messages: messages, budget_violations: 0 };
            stats.push(run_id, phase, &s);
        };
        charge("rake", layers.max(1), id_bits, 2 * (frac.len() - core.len()) as u64);
        if core.is_empty() {
            break;
        }
        if iterations.len() >= limit {
            return Err(RoundingError::NoProgress(iterations.len()));
        }
        let pairs: Vec<(usize, usize)> = core.iter().map(|&e| g.edges[e]).collect();
        let vg = compress_virtual_graph(n, &pairs, ContractRule::OddOnly);
        charge("compress", vcost, id_bits, 2 * core.len() as u64);
        let mut local = vec![usize::MAX; n];
        for (k, &v) in vg.nodes.iter().enumerate() {
            local[v] = k;
        }
        let vn = vg.nodes.len();
        let vpairs: Vec<(usize, usize)> = vg.edges.iter().map(|e| (local[e.u], local[e.v])).collect();
        debug_assert!(odd_cycle_vertex(vn, &vpairs).is_none(), "contraction broke bipartiteness");
        let elements: Vec<Element> = vg
            .edges
            .iter()
            .map(|e| e.base_edges.iter().enumerate().map(|(k, &b)| (core[b], k % 2 == 0)).collect())
            .collect();
        let mut report = IterationReport {
            fractional_before: frac.len(),
            core_nodes: core.iter().flat_map(|&e| [g.edges[e].0, g.edges[e].1]).collect::<std::collections::BTreeSet<_>>().len(),
            core_edges: core.len(),
            virtual_nodes: vn,
            virtual_edges: vpairs.len(),
            dense_enough: 5 * vpairs.len() >= 6 * vn,
            clusters: 0,
            cut_edges: 0,
            ldd_attempts: 0,
            ldd_fallback: false,
            cycles: 0,
            fractional_after: 0,
        };

        let cluster_has_cycle = |cl: &LddClustering| {
            let mut edges_in = vec![0usize; cl.centers.len()];
            let mut nodes_in = vec![0usize; cl.centers.len()];
            for v in 0..vn {
                nodes_in[cl.cluster_of[v]] += 1;
            }
            for &(a, b) in &vpairs {
                if cl.cluster_of[a] == cl.cluster_of[b] {
                    edges_in[cl.cluster_of[a]] += 1;
                }
            }
            (0..cl.centers.len()).any(|k| edges_in[k] >= nodes_in[k])
        };
        let mut clustering = None;
        let mut ldd_rounds = 0;
        for _ in 0..cfg.ldd_attempts {
            report.ldd_attempts += 1;
            let cl = ldd(vn, &vpairs, cfg.beta, &mut rng);
            ldd_rounds += (cl.max_radius() as u64 + 1) * vcost;
            let good = cl.cut_fraction(vpairs.len()) <= 2.0 * cfg.beta && cluster_has_cycle(&cl);
            if good {
                clustering = Some(cl);
                break;
            }
        }
        let cl = clustering.unwrap_or_else(|| {
            report.ldd_fallback = true;
            LddClustering::components(vn, &vpairs)
        });
        charge("ldd", ldd_rounds.max(1), id_bits + 64, 2 * vpairs.len() as u64 * report.ldd_attempts as u64);
        report.clusters = cl.centers.len();
        report.cut_edges = cl.cut_edges.len();

        // Local indexing per cluster, center first so BFS roots there.
        let k = cl.centers.len();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &c in &cl.centers {
            members[cl.cluster_of[c]].push(c);
        }
        for v in 0..vn {
            if cl.centers[cl.cluster_of[v]] != v {
                members[cl.cluster_of[v]].push(v);
            }
        }
        let mut pos = vec![0usize; vn];
        for m in &members {
            for (i, &v) in m.iter().enumerate() {
                pos[v] = i;
            }
        }
        let mut inner: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (id, &(a, b)) in vpairs.iter().enumerate() {
            if cl.cluster_of[a] == cl.cluster_of[b] {
                inner[cl.cluster_of[a]].push(id);
            }
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for c in 0..k {
            let cn = members[c].len();
            let cedges: Vec<(usize, usize)> = inner[c].iter().map(|&id| (pos[vpairs[id].0], pos[vpairs[id].1])).collect();
            let mut odd = vec![false; cn];
            for &(a, b) in &cedges {
                odd[a] = !odd[a];
                odd[b] = !odd[b];
            }
            let join = t_join(cn, &cedges, &odd)?;
            let mut in_join = vec![false; cedges.len()];
            for &j in &join {
                in_join[j] = true;
            }
            let rest: Vec<usize> = (0..cedges.len()).filter(|&i| !in_join[i]).collect();
            let rest_pairs: Vec<(usize, usize)> = rest.iter().map(|&i| cedges[i]).collect();
            for cyc in cycle_decompose(cn, &rest_pairs)? {
                cycles.push(cyc.into_iter().map(|i| inner[c][rest[i]]).collect());
            }
        }
        charge("tjoin", (2 * cl.max_radius() as u64 + 1) * vcost, id_bits + 1, 2 * vpairs.len() as u64);

        let mut longest = 0u64;
        let mut moved = 0u64;
        let mut delta_bits = 0u64;
        for cyc in &cycles {
            if cyc.len() % 2 == 1 {
                return Err(RoundingError::OddCycle(cyc.len()));
            }
            let elems: Vec<Element> = cyc.iter().map(|&id| elements[id].clone()).collect();
            let base_len: u64 = elems.iter().map(|e| e.len() as u64).sum();
            longest = longest.max(base_len);
            moved += base_len;
            let delta = rotate(&elems, &mut w, cap);
            delta_bits = delta_bits.max(delta.bits());
        }
        charge("cycles", longest.max(1), delta_bits, moved);
        cycles_rounded += cycles.len();
        report.cycles = cycles.len();
        report.fractional_after = (0..g.edges.len()).filter(|&e| !w[e].is_integral(&cap[e])).count();
        let stuck = report.fractional_after >= report.fractional_before;
        iterations.push(report);
        if stuck {
            return Err(RoundingError::NoProgress(iterations.len()));
        }
    }
    let total = stats.total();
    Ok(Rounded { w, iterations, cycles_rounded, stats, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Vec<(usize, usize)> {
        vec![(0, 1), (1, 2), (2, 3), (3, 0)]
    }

    #[test]
    fn single_cycle_moves_smaller_step() {
        let mut w = vec![0.3, 0.6, 0.3, 0.6];
        let d = round_single_cycle(&c4(), &[0, 1, 2, 3], &mut w, &[1.0; 4]).unwrap();
        assert!((d - 0.3).abs() < 1e-12);
        let want = [0.0, 0.9, 0.0, 0.9];
        assert!(w.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12), "{w:?}");
    }

    #[test]
    fn half_cycle_ties_raise_lowest_edge() {
        let mut w = vec![0.5; 4];
        round_single_cycle(&c4(), &[0, 1, 2, 3], &mut w, &[1.0; 4]).unwrap();
        assert_eq!(w, vec![1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn single_cycle_errors() {
        let tri = [(0, 1), (1, 2), (2, 0)];
        assert_eq!(round_single_cycle(&tri, &[0, 1, 2], &mut [0.5; 3], &[1.0; 3]), Err(RoundingError::OddCycle(3)));
        let mut w = vec![0.0, 0.5, 0.5, 0.5];
        assert_eq!(round_single_cycle(&c4(), &[0, 1, 2, 3], &mut w, &[1.0; 4]), Err(RoundingError::IntegralCycleEdge(0)));
    }

    #[test]
    fn c4_and_tree() {
        let g = WeightedGraph::unit(4, c4(), vec![0.5; 4]).unwrap();
        let r = round_cycles(&g, &RoundingConfig::default(), "t").unwrap();
        assert!(r.w == vec![1.0, 0.0, 1.0, 0.0] || r.w == vec![0.0, 1.0, 0.0, 1.0]);
        let tree = WeightedGraph::unit(4, vec![(0, 1), (1, 2), (1, 3)], vec![0.2, 0.3, 0.4]).unwrap();
        let r = round_cycles(&tree, &RoundingConfig::default(), "t").unwrap();
        assert_eq!(r.w, tree.w);
        assert!(r.iterations.is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(WeightedGraph::unit(2, vec![(0, 1)], vec![1.5]), Err(RoundingError::WeightOutOfRange { .. })));
        assert!(matches!(WeightedGraph::unit(3, vec![(0, 1), (1, 2), (2, 0)], vec![0.5; 3]), Err(RoundingError::NotBipartite(_))));
    }

    #[test]
    fn rational_grid_is_exact() {
        // 3x3 complete bipartite graph with weights 1/3.
        let edges: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
        let third = BigRational::new(1.into(), 3.into());
        let g = WeightedGraph::unit(6, edges.clone(), vec![third; 9]).unwrap();
        let before = g.degree_sums();
        let r = round_cycles(&g, &RoundingConfig::default(), "t").unwrap();
        assert_eq!(degree_sums(6, &edges, &r.w), before);
        let frac: Vec<usize> = (0..9).filter(|&e| !r.w[e].is_integral(&<BigRational as Weight>::one())).collect();
        assert!(!has_cycle(6, &edges, frac));
    }
}
