//! Big-gift forest: cycle elimination, pruning to degree two, and the final
//! big-gift assignment by rooting each tree.
//!
//! Vertices of the big-gift graph are children `0..|C|` followed by gifts
//! `|C| + g`.

use serde::{Deserialize, Serialize};

use super::SantaError;
use crate::instances::Instance;
use crate::rounding::{round_cycles, Rounded, RoundingConfig, WeightedGraph, FLOAT_TAU};
use crate::sim::forest::root_forest;

/// Rounds the cycles out of `G_x`. Returns the new big part (per instance
/// edge) and the rounding record. Child and gift sums are unchanged.
pub fn eliminate_big_cycles(
    inst: &Instance,
    x: &[f64],
    cfg: &RoundingConfig,
    run_id: &str,
) -> Result<(Vec<f64>, Rounded<f64>), SantaError> {
    let nc = inst.n_children();
    let ids: Vec<usize> = (0..x.len()).filter(|&e| x[e] > 0.0).collect();
    let edges = ids.iter().map(|&e| (inst.edges()[e].0, nc + inst.edges()[e].1)).collect();
    let w = ids.iter().map(|&e| x[e]).collect();
    let g = WeightedGraph::unit(nc + inst.n_gifts(), edges, w)?;
    let r = round_cycles(&g, cfg, run_id)?;
    let mut out = vec![0.0; x.len()];
    for (k, &e) in ids.iter().enumerate() {
        out[e] = r.w[k];
    }
    Ok((out, r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeKind {
    /// Some big gift is a leaf; `child` is its neighbor and becomes the root.
    BigLeaf { gift: usize, child: usize },
    /// Every leaf is a child and `|B*| = |C*| - 1`.
    Deficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTree {
    pub children: Vec<usize>,
    pub gifts: Vec<usize>,
    pub kind: TreeKind,
    /// Children of this tree that lost their edge to a pruned big gift.
    pub lost: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterForest {
    pub trees: Vec<ClusterTree>,
    /// Instance edges kept in the forest.
    pub kept: Vec<usize>,
    /// Instance edges removed by pruning.
    pub dropped: Vec<usize>,
    pub tree_of_child: Vec<usize>,
}

impl ClusterForest {
    pub fn max_gift_degree(&self, inst: &Instance) -> usize {
        let mut deg = vec![0; inst.n_gifts()];
        for &e in &self.kept {
            deg[inst.edges()[e].1] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

/// Drops, at every big gift of degree `d > 2`, the `d - 2` lightest edges
/// of weight at most one half (ties by child id), then splits the forest
/// into trees. `x` must be positive only on a forest.
pub fn prune_big_clusters(inst: &Instance, x: &[f64]) -> Result<ClusterForest, SantaError> {
    let (nc, ng) = (inst.n_children(), inst.n_gifts());
    let mut at_gift: Vec<Vec<usize>> = vec![Vec::new(); ng];
    for e in (0..x.len()).filter(|&e| x[e] > 0.0) {
        at_gift[inst.edges()[e].1].push(e);
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (g, list) in at_gift.iter_mut().enumerate() {
        let d = list.len();
        if d > 2 {
            let mut cand: Vec<usize> = list.iter().copied().filter(|&e| x[e] <= 0.5 + FLOAT_TAU).collect();
            if cand.len() < d - 2 {
                return Err(SantaError::Structure(format!("big gift {g} has too few edges of weight at most 1/2")));
            }
            cand.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(inst.edges()[a].0.cmp(&inst.edges()[b].0)));
            let gone: Vec<usize> = cand[..d - 2].to_vec();
            list.retain(|e| !gone.contains(e));
            dropped.extend(gone);
        }
        kept.extend(list.iter().copied());
    }
    kept.sort_unstable();
    dropped.sort_unstable();

    let n = nc + ng;
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(d: &mut [usize], mut v: usize) -> usize {
        while d[v] != v {
            d[v] = d[d[v]];
            v = d[v];
        }
        v
    }
    let mut deg = vec![0usize; n];
    for &e in &kept {
        let (c, g) = inst.edges()[e];
        let (a, b) = (find(&mut dsu, c), find(&mut dsu, nc + g));
        if a == b {
            return Err(SantaError::Structure("big-gift graph has a cycle".into()));
        }
        dsu[a] = b;
        deg[c] += 1;
        deg[nc + g] += 1;
    }
    let mut slot = vec![usize::MAX; n];
    let mut trees: Vec<ClusterTree> = Vec::new();
    let mut tree_of_child = vec![0; nc];
    for v in 0..n {
        if v >= nc && deg[v] == 0 {
            continue;
        }
        let r = find(&mut dsu, v);
        if slot[r] == usize::MAX {
            slot[r] = trees.len();
            trees.push(ClusterTree { children: Vec::new(), gifts: Vec::new(), kind: TreeKind::Deficient, lost: Vec::new() });
        }
        let t = &mut trees[slot[r]];
        if v < nc {
            t.children.push(v);
            tree_of_child[v] = slot[r];
        } else {
            t.gifts.push(v - nc);
        }
    }
    for &e in &dropped {
        let c = inst.edges()[e].0;
        trees[tree_of_child[c]].lost.push(c);
    }
    for t in &mut trees {
        t.lost.sort_unstable();
        t.lost.dedup();
        if let Some(&g) = t.gifts.iter().find(|&&g| deg[nc + g] == 1) {
            let e = kept.iter().copied().find(|&e| inst.edges()[e].1 == g).unwrap();
            t.kind = TreeKind::BigLeaf { gift: g, child: inst.edges()[e].0 };
        } else if t.gifts.len() + 1 != t.children.len() {
            return Err(SantaError::Structure(format!(
                "tree with {} children and {} big gifts has no big-gift leaf",
                t.children.len(),
                t.gifts.len()
            )));
        }
    }
    Ok(ClusterForest { trees, kept, dropped, tree_of_child })
}

/// Roots every tree at `roots[tree]` and gives each big gift to the child
/// below it; a big-gift leaf goes to the root. Returns the owner per gift
/// (only big gifts are set) and the rooting iterations.
pub fn assign_big_gifts(inst: &Instance, forest: &ClusterForest, roots: &[usize]) -> Result<(Vec<Option<usize>>, u32), SantaError> {
    let nc = inst.n_children();
    let edges: Vec<(usize, usize)> = forest.kept.iter().map(|&e| (inst.edges()[e].0, nc + inst.edges()[e].1)).collect();
    let rooted = root_forest(nc + inst.n_gifts(), &edges, roots)?;
    let mut owner = vec![None; inst.n_gifts()];
    for c in 0..nc {
        if let Some(p) = rooted.parent[c] {
            owner[p - nc] = Some(c);
        }
    }
    for t in &forest.trees {
        if let TreeKind::BigLeaf { gift, child } = t.kind {
            if owner[gift].is_none() {
                owner[gift] = Some(child);
            }
        }
    }
    Ok((owner, rooted.iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prune_drops_lightest_candidate() {
        let inst = Instance::new(3, vec![5], vec![(0, 0), (1, 0), (2, 0)]).unwrap();
        let f = prune_big_clusters(&inst, &[0.6, 0.3, 0.1]).unwrap();
        assert_eq!(f.dropped, vec![2]);
        assert_eq!(f.max_gift_degree(&inst), 2);
        assert_eq!(f.trees.len(), 2);
        let big = &f.trees[f.tree_of_child[0]];
        assert_eq!(big.kind, TreeKind::Deficient);
        assert_eq!(f.trees[f.tree_of_child[2]].children, vec![2]);
    }

    #[test]
    fn path_assignment_points_away_from_root() {
        let inst = Instance::new(2, vec![5], vec![(0, 0), (1, 0)]).unwrap();
        let f = prune_big_clusters(&inst, &[0.5, 0.5]).unwrap();
        let (owner, _) = assign_big_gifts(&inst, &f, &[0]).unwrap();
        assert_eq!(owner, vec![Some(1)]);
    }

    #[test]
    fn four_cycle_becomes_matching() {
        let inst = Instance::new(2, vec![5, 5], vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let (x, _) = eliminate_big_cycles(&inst, &[0.5; 4], &RoundingConfig::default(), "t").unwrap();
        assert!(x.iter().all(|&v| v == 0.0 || v == 1.0), "{x:?}");
        assert_eq!(x.iter().sum::<f64>(), 2.0);
    }
}
