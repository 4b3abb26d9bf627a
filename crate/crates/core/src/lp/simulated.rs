//! The feasibility iteration as a message-passing protocol.
//!
//! Network: one node per packing row, covering row and variable, with an
//! edge for every nonzero coefficient. Components of that graph are chained
//! by backbone edges between their smallest node ids so that global
//! aggregates can reach everyone. Per iteration:
//!
//! 1. variables send their value to every row they appear in;
//! 2. rows compute their level; an aggregate over a BFS tree rooted at the
//!    leader yields the stop flags, the retired count and the extreme levels;
//! 3. live rows send their gradient contribution to each variable and the
//!    weight sums are aggregated;
//! 4. variables decide their step, and an aggregate counts non-voters.

use std::collections::BTreeMap;

use serde::Serialize;

use super::kernel::{
    contribution, covering_weight, dot, empty_covering_row, global_sum, initial_x, packing_weight, variable_step,
    InfeasibleKind, KernelRun, LevelSummary, Params, SolverConfig, Verdict,
};
use super::{LpError, MixedLP};
use crate::fsum::ExactSum;
use crate::sim::link::{frames_for, run_protocol, wire_bits};
use crate::sim::primitives::SumU64;
use crate::sim::{
    aggregate, bfs_tree, bits_for, elect_leader, Aggregate, BfsTree, CongestNetwork, Envelope, NetConfig, Payload,
    RoundStats, SimError, SimMode, StatsLog,
};

#[derive(Debug, Clone, Serialize)]
pub struct SimulatedRun {
    pub run: KernelRun,
    pub stats: StatsLog,
    pub total: RoundStats,
    pub nodes: usize,
    pub backbone_edges: usize,
}

/// Node ids: packing rows first, then covering rows, then variables.
pub struct LpNetwork {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub backbone: usize,
}

pub fn lp_network(lp: &MixedLP) -> LpNetwork {
    let (n_p, n_c, m) = (lp.n_p(), lp.n_c(), lp.m());
    let var = |i: usize| n_p + n_c + i;
    let n_nodes = n_p + n_c + m;
    let mut edges = Vec::with_capacity(lp.nnz());
    for (j, row) in lp.p_rows().iter().enumerate() {
        edges.extend(row.iter().map(|&(i, _)| (j, var(i))));
    }
    for (j, row) in lp.c_rows().iter().enumerate() {
        edges.extend(row.iter().map(|&(i, _)| (n_p + j, var(i))));
    }
    let mut dsu: Vec<usize> = (0..n_nodes).collect();
    fn find(d: &mut [usize], mut x: usize) -> usize {
        while d[x] != x {
            d[x] = d[d[x]];
            x = d[x];
        }
        x
    }
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
        if ra != rb {
            dsu[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut reps: Vec<usize> = (0..n_nodes).filter(|&v| find(&mut dsu, v) == v).collect();
    reps.sort_unstable();
    let backbone = reps.len().saturating_sub(1);
    edges.extend(reps.windows(2).map(|w| (w[0], w[1])));
    LpNetwork { n_nodes, edges, backbone }
}

#[derive(Debug, Clone, Copy)]
struct Scalar {
    value: f64,
    bits: u64,
}

impl Payload for Scalar {
    fn bit_len(&self) -> u64 {
        self.bits
    }
}

/// One message per (sender, receiver) pair delivered along network edges.
/// Returns each node's inbox sorted by sender id.
fn exchange(
    net: &mut CongestNetwork,
    mode: SimMode,
    outgoing: Vec<Vec<(usize, Scalar)>>,
) -> Result<(Vec<Vec<(usize, f64)>>, RoundStats), SimError> {
    let n = net.len();
    match mode {
        SimMode::Faithful => {
            let mut st: Vec<(Vec<(usize, Scalar)>, Vec<(usize, f64)>)> =
                outgoing.into_iter().map(|o| (o, Vec::new())).collect();
            let stats = run_protocol(net, &mut st, u64::MAX, |ctx, (out_list, inbox_store), inbox: &[Envelope<Scalar>], out| {
                if ctx.round == 1 {
                    for (to, msg) in out_list.drain(..) {
                        out.send(to.into(), msg);
                    }
                }
                inbox_store.extend(inbox.iter().map(|e| (e.from.index(), e.msg.value)));
            })?;
            let inboxes = st
                .into_iter()
                .map(|(_, mut inbox)| {
                    inbox.sort_by_key(|e| e.0);
                    inbox
                })
                .collect();
            Ok((inboxes, stats))
        }
        SimMode::FastPath => {
            let budget = net.bit_budget();
            let strict = net.is_strict();
            let mut inboxes: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
            let mut stats = RoundStats::rounds(1);
            let mut longest = 0;
            for (from, list) in outgoing.into_iter().enumerate() {
                let mut per_edge: BTreeMap<usize, u64> = BTreeMap::new();
                for (to, msg) in list {
                    if net.neighbors(from.into()).binary_search(&to.into()).is_err() {
                        return Err(SimError::NotNeighbor { round: net.round() + 1, from: from.into(), to: to.into() });
                    }
                    *per_edge.entry(to).or_default() += wire_bits(&msg);
                    inboxes[to].push((from, msg.value));
                }
                for (_, bits) in per_edge {
                    let k = frames_for(bits, budget, strict);
                    longest = longest.max(k);
                    stats.total_messages += k;
                    let peak = if strict { bits.min(budget) } else { bits };
                    stats.max_bits_on_any_edge_per_round = stats.max_bits_on_any_edge_per_round.max(peak);
                }
            }
            stats.rounds_elapsed += longest;
            net.charge(&stats);
            Ok((inboxes, stats))
        }
    }
}

fn float_bits(p: &Params, v: f64) -> u64 {
    if v.is_finite() {
        p.bits(v)
    } else {
        2
    }
}

#[derive(Debug, Clone, Copy)]
struct LevelAgg {
    params: Params,
    stop: bool,
    retired: u64,
    max_p: f64,
    min_c: f64,
}

impl Payload for LevelAgg {
    fn bit_len(&self) -> u64 {
        1 + bits_for(self.retired) + float_bits(&self.params, self.max_p) + float_bits(&self.params, self.min_c)
    }
}

impl Aggregate for LevelAgg {
    fn combine(&mut self, o: &Self) {
        self.stop |= o.stop;
        self.retired += o.retired;
        self.max_p = self.max_p.max(o.max_p);
        self.min_c = self.min_c.min(o.min_c);
    }
}

#[derive(Debug, Clone)]
struct WeightAgg {
    y: ExactSum,
    z: ExactSum,
}

impl Payload for WeightAgg {
    fn bit_len(&self) -> u64 {
        let parts = (self.y.partial_count() + self.z.partial_count()) as u64;
        64 * parts + 2 * bits_for(parts)
    }
}

impl Aggregate for WeightAgg {
    fn combine(&mut self, o: &Self) {
        self.y.merge(&o.y);
        self.z.merge(&o.z);
    }
}

struct Phases {
    order: Vec<&'static str>,
    acc: BTreeMap<&'static str, RoundStats>,
}

impl Phases {
    fn add(&mut self, phase: &'static str, s: RoundStats) {
        if !self.acc.contains_key(phase) {
            self.order.push(phase);
        }
        self.acc.entry(phase).or_default().absorb(&s);
    }

    fn log(&self, run_id: &str) -> StatsLog {
        let mut log = StatsLog::default();
        for p in &self.order {
            log.push(run_id, p, &self.acc[p]);
        }
        log
    }
}

/// Runs the feasibility iteration on the simulator. Verdicts, iteration
/// counts and returned vectors coincide with [`super::run_kernel`].
pub fn simulate_kernel(
    lp: &MixedLP,
    eps: f64,
    cfg: &SolverConfig,
    net_cfg: NetConfig,
    mode: SimMode,
    charge_global_knowledge: bool,
    run_id: &str,
) -> Result<SimulatedRun, LpError> {
    let p = Params::new(lp, eps, cfg)?;
    let topo = lp_network(lp);
    let mut net = CongestNetwork::from_edges(topo.n_nodes, &topo.edges, net_cfg)?;
    let mut phases = Phases { order: Vec::new(), acc: BTreeMap::new() };
    let (n_p, n_c, m) = (lp.n_p(), lp.n_c(), lp.m());
    let var = |i: usize| n_p + n_c + i;

    let (leader, s) = elect_leader(&mut net, None, mode)?;
    phases.add("setup", s);
    let (tree, s) = bfs_tree(&mut net, leader, mode)?;
    phases.add("setup", s);
    if charge_global_knowledge {
        for role in 0..3 {
            let vals = (0..topo.n_nodes)
                .map(|v| SumU64(u64::from(if role == 0 { v < n_p } else if role == 1 { v >= n_p && v < n_p + n_c } else { v >= n_p + n_c })))
                .collect();
            let (_, s) = aggregate(&mut net, &tree, vals, mode)?;
            phases.add("setup", s);
        }
    }
    let finish = |verdict, iterations, stop, max_live_level, monotone, net: &CongestNetwork, phases: &Phases| {
        Ok(SimulatedRun {
            run: KernelRun { verdict, iterations, params: p, stop, max_live_level, monotone },
            stats: phases.log(run_id),
            total: net.stats(),
            nodes: topo.n_nodes,
            backbone_edges: topo.backbone,
        })
    };
    if let Some(j) = empty_covering_row(lp) {
        let v = Verdict::Infeasible(InfeasibleKind::EmptyCoveringRow(j));
        return finish(v, 0, None, 0.0, true, &net, &phases);
    }

    // Each variable node's state.
    let mut x: Vec<f64> = (0..m).map(|i| initial_x(lp, i, &p)).collect();
    // Initial coefficients so variables learn their column norms.
    let mut coef_out: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); topo.n_nodes];
    for (j, row) in lp.p_rows().iter().enumerate() {
        coef_out[j].extend(row.iter().map(|&(i, v)| (var(i), Scalar { value: v, bits: 64 })));
    }
    for (j, row) in lp.c_rows().iter().enumerate() {
        coef_out[n_p + j].extend(row.iter().map(|&(i, v)| (var(i), Scalar { value: v, bits: 64 })));
    }
    let (_, s) = exchange(&mut net, mode, coef_out)?;
    phases.add("setup", s);

    let mut t = 0u64;
    let mut max_live = 0.0f64;
    let mut monotone = true;
    loop {
        // Variables announce their values.
        let mut out: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); topo.n_nodes];
        for i in 0..m {
            let msg = Scalar { value: x[i], bits: p.bits(x[i]) };
            out[var(i)].extend(lp.p_col(i).iter().map(|&(j, _)| (j, msg)));
            out[var(i)].extend(lp.c_col(i).iter().map(|&(j, _)| (n_p + j, msg)));
        }
        let (inbox, s) = exchange(&mut net, mode, out)?;
        phases.add("values", s);
        // Rows compute their levels from what they received, in sender order.
        let level = |node: usize, row: &[(usize, f64)]| -> f64 {
            debug_assert_eq!(inbox[node].len(), row.len());
            dot(row.iter().zip(&inbox[node]).map(|(&(_, c), &(_, xv))| (c, xv)))
        };
        let pl: Vec<f64> = lp.p_rows().iter().enumerate().map(|(j, r)| level(j, r)).collect();
        let cl: Vec<f64> = lp.c_rows().iter().enumerate().map(|(j, r)| level(n_p + j, r)).collect();
        let vals: Vec<LevelAgg> = (0..topo.n_nodes)
            .map(|v| {
                let mut a = LevelAgg { params: p, stop: false, retired: 0, max_p: f64::NEG_INFINITY, min_c: f64::INFINITY };
                if v < n_p {
                    a.stop = pl[v] >= p.k;
                    a.max_p = p.q(pl[v]);
                } else if v < n_p + n_c {
                    let l = cl[v - n_p];
                    if l >= p.k {
                        a.retired = 1;
                    } else {
                        a.min_c = p.q(l);
                    }
                }
                a
            })
            .collect();
        let (agg, s) = aggregate(&mut net, &tree, vals, mode)?;
        phases.add("levels", s);
        let summary = LevelSummary {
            stop_packing: agg.stop,
            retired: agg.retired as usize,
            max_packing: agg.max_p,
            min_live_covering: agg.min_c,
        };
        debug_assert_eq!(summary, LevelSummary::from_levels(&p, &pl, &cl));
        if let Some(stop) = summary.stop(n_c) {
            let out = x.iter().map(|v| v / p.k).collect();
            return finish(Verdict::Feasible(out), t, Some(stop), max_live, monotone, &net, &phases);
        }
        if t >= p.r {
            return finish(Verdict::Infeasible(InfeasibleKind::IterationCap), t, None, max_live, monotone, &net, &phases);
        }
        max_live = pl.iter().copied().fold(max_live, f64::max);
        // Live rows weight themselves and send contributions.
        let mut out: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); topo.n_nodes];
        let mut wvals: Vec<WeightAgg> = (0..topo.n_nodes).map(|_| WeightAgg { y: ExactSum::new(), z: ExactSum::new() }).collect();
        for (j, row) in lp.p_rows().iter().enumerate() {
            let w = packing_weight(&p, pl[j], summary.max_packing);
            wvals[j].y.add(w);
            for &(i, c) in row {
                let v = contribution(&p, c, w);
                out[j].push((var(i), Scalar { value: v, bits: p.bits(v) }));
            }
        }
        for (j, row) in lp.c_rows().iter().enumerate() {
            if cl[j] >= p.k {
                continue;
            }
            max_live = max_live.max(cl[j]);
            let w = covering_weight(&p, cl[j], summary.min_live_covering);
            wvals[n_p + j].z.add(w);
            for &(i, c) in row {
                let v = contribution(&p, c, w);
                out[n_p + j].push((var(i), Scalar { value: v, bits: p.bits(v) }));
            }
        }
        let (grads, s) = exchange(&mut net, mode, out)?;
        phases.add("gradients", s);
        let (sums, s) = aggregate(&mut net, &tree, wvals, mode)?;
        phases.add("weight_sums", s);
        let (ys, zs) = (global_sum(&p, &sums.y), global_sum(&p, &sums.z));
        let mut next = x.clone();
        let mut movers = vec![SumU64(0); topo.n_nodes];
        for i in 0..m {
            let inbox = &grads[var(i)];
            let a_parts: Vec<f64> = inbox.iter().filter(|e| e.0 < n_p).map(|e| e.1).collect();
            let b_parts: Vec<f64> = inbox.iter().filter(|e| e.0 >= n_p).map(|e| e.1).collect();
            let (nx, voted) = variable_step(&p, x[i], &a_parts, ys, &b_parts, zs);
            next[i] = nx;
            movers[var(i)] = SumU64(u64::from(!voted));
        }
        let (count, s) = aggregate(&mut net, &tree, movers, mode)?;
        phases.add("votes", s);
        if count.0 == 0 {
            return finish(Verdict::Infeasible(InfeasibleKind::Certificate), t, None, max_live, monotone, &net, &phases);
        }
        let grew = next.iter().zip(&x).any(|(a, b)| a > b);
        monotone &= grew && next.iter().zip(&x).all(|(a, b)| a >= b);
        x = next;
        t += 1;
    }
}

/// BFS tree of the LP network rooted at its leader (for callers that need
/// to charge broadcasts of their own).
pub fn lp_tree(lp: &MixedLP, net_cfg: NetConfig, mode: SimMode) -> Result<(CongestNetwork, BfsTree), LpError> {
    let topo = lp_network(lp);
    let mut net = CongestNetwork::from_edges(topo.n_nodes, &topo.edges, net_cfg)?;
    let (leader, _) = elect_leader(&mut net, None, mode)?;
    let (tree, _) = bfs_tree(&mut net, leader, mode)?;
    Ok((net, tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::run_kernel;

    fn lp() -> MixedLP {
        MixedLP::unit(2, 2, 3, &[(0, 0, 1.0), (0, 1, 0.5), (1, 2, 1.0)], &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 1.5)]).unwrap()
    }

    #[test]
    fn matches_sequential_kernel() {
        for quantize in [false, true] {
            let cfg = SolverConfig { quantize, ..SolverConfig::default() };
            let seq = run_kernel(&lp(), 0.5, &cfg).unwrap();
            for mode in [SimMode::Faithful, SimMode::FastPath] {
                let net = NetConfig { strict: quantize, ..NetConfig::default() };
                let sim = simulate_kernel(&lp(), 0.5, &cfg, net, mode, false, "t").unwrap();
                assert_eq!(sim.run, seq);
            }
        }
    }

    #[test]
    fn modes_charge_identical_rounds() {
        let cfg = SolverConfig { quantize: true, ..SolverConfig::default() };
        let net = NetConfig { strict: true, ..NetConfig::default() };
        let a = simulate_kernel(&lp(), 0.5, &cfg, net, SimMode::Faithful, true, "t").unwrap();
        let b = simulate_kernel(&lp(), 0.5, &cfg, net, SimMode::FastPath, true, "t").unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.total, b.total);
        assert_eq!(a.total.budget_violations, 0);
    }
}
