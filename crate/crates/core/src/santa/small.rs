//! Integral small-gift assignment from the scaled fractional part `z`.
//!
//! Edge `(c, s)` carries `w = z_cs · v_s` with cap `v_s`, so cycle rounding
//! keeps every child's fractional value. Edges at `v_s` are assigned
//! outright. The remaining fractional edges form a forest; each tree is
//! rooted at its lowest child and every gift goes to its parent, so a child
//! gives up at most its own parent gift.

use serde::{Deserialize, Serialize};

use super::SantaError;
use crate::instances::Instance;
use crate::rounding::{round_cycles, RoundingConfig, WeightedGraph};
use crate::sim::forest::root_forest;
use crate::sim::stats::StatsLog;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallRounding {
    /// Owner per gift; only small gifts are set.
    pub owner: Vec<Option<usize>>,
    /// Fractional value `Σ_s z_cs v_s` per child before rounding.
    pub fractional_value: Vec<f64>,
    pub cycles_rounded: usize,
    pub forest_iterations: u32,
    pub stats: StatsLog,
}

pub fn round_small_gifts(inst: &Instance, z: &[f64], cfg: &RoundingConfig, run_id: &str) -> Result<SmallRounding, SantaError> {
    let (nc, ng) = (inst.n_children(), inst.n_gifts());
    let units = inst.units();
    let ids: Vec<usize> = (0..z.len()).filter(|&e| z[e] > 0.0 && units[inst.edges()[e].1] > 0).collect();
    let edges: Vec<(usize, usize)> = ids.iter().map(|&e| (inst.edges()[e].0, nc + inst.edges()[e].1)).collect();
    let cap: Vec<f64> = ids.iter().map(|&e| units[inst.edges()[e].1] as f64).collect();
    let w: Vec<f64> = ids.iter().zip(&cap).map(|(&e, &v)| (z[e].min(1.0) * v).min(v)).collect();
    let mut fractional_value = vec![0.0; nc];
    for (k, &(c, _)) in edges.iter().enumerate() {
        fractional_value[c] += w[k];
    }
    let g = WeightedGraph::new(nc + ng, edges.clone(), w, cap.clone())?;
    let r = round_cycles(&g, cfg, run_id)?;
    let mut stats = r.stats;

    let mut owner = vec![None; ng];
    let mut forest = Vec::new();
    for k in 0..ids.len() {
        let (c, s) = edges[k];
        if r.w[k] == cap[k] {
            if owner[s - nc].is_some() {
                return Err(SantaError::Structure(format!("small gift {} rounded up twice", s - nc)));
            }
            owner[s - nc] = Some(c);
        } else if r.w[k] > 0.0 {
            forest.push(k);
        }
    }
    let fedges: Vec<(usize, usize)> = forest.iter().map(|&k| edges[k]).collect();
    // Lowest child of every tree becomes its root.
    let mut dsu: Vec<usize> = (0..nc + ng).collect();
    fn find(d: &mut [usize], mut v: usize) -> usize {
        while d[v] != v {
            d[v] = d[d[v]];
            v = d[v];
        }
        v
    }
    for &(a, b) in &fedges {
        let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
        dsu[ra] = rb;
    }
    let mut in_forest = vec![false; nc];
    for &(c, _) in &fedges {
        in_forest[c] = true;
    }
    let mut taken = vec![false; nc + ng];
    let mut roots = Vec::new();
    for c in (0..nc).filter(|&c| in_forest[c]) {
        let r = find(&mut dsu, c);
        if !std::mem::replace(&mut taken[r], true) {
            roots.push(c);
        }
    }
    let rooted = root_forest(nc + ng, &fedges, &roots)?;
    for s in nc..nc + ng {
        if let Some(p) = rooted.parent[s] {
            if owner[s - nc].is_none() {
                owner[s - nc] = Some(p);
            }
        }
    }
    let rounds = crate::sim::stats::RoundStats::rounds(u64::from(rooted.iterations).max(1));
    stats.push(run_id, "forest", &rounds);
    Ok(SmallRounding {
        owner,
        fractional_value,
        cycles_rounded: r.cycles_rounded,
        forest_iterations: rooted.iterations,
        stats,
    })
}

/// Value each child receives from `owner`, in units.
pub fn received(inst: &Instance, owner: &[Option<usize>]) -> Vec<u64> {
    let mut out = vec![0u64; inst.n_children()];
    for (g, c) in owner.iter().enumerate() {
        if let Some(c) = c {
            out[*c] += inst.units()[g];
        }
    }
    out
}
