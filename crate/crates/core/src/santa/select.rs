//! One child per deficient tree, drawn with probability proportional to
//! its small-gift value, and the rescaled small-gift assignment `z`.
//!
//! Large trees sample by unrolling a Rake/Compress decomposition of the
//! child tree (children adjacent through a degree-two big gift): a vertex
//! drawn at level `i + 1` re-draws among the vertices merged into it at
//! level `i`, in proportion to their weights there. Small trees gather
//! their weights at one child and draw directly. Both give the same law.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::big::{ClusterForest, TreeKind};
use super::lp::FractionalSolution;
use super::SantaError;
use crate::instances::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    /// Gather below the threshold (in tree vertices), Rake/Compress above.
    Auto { threshold: usize },
    Gather,
    RakeCompress,
}

impl Default for SamplingMode {
    fn default() -> Self {
        SamplingMode::Auto { threshold: 64 }
    }
}

fn pick<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    if weights.len() == 1 {
        return 0;
    }
    WeightedIndex::new(weights).expect("positive total weight").sample(rng)
}

/// A merge recorded during the decomposition: `members[0]` survives and
/// the weights are those before the merge.
struct Merge {
    members: Vec<usize>,
    weights: Vec<f64>,
}

/// Rake/Compress stages of a tree on `0..k`. Each stage maps a surviving
/// vertex to the merge it absorbed.
fn decompose(k: usize, edges: &[(usize, usize)], w: &[f64]) -> Vec<Vec<Option<Merge>>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut w = w.to_vec();
    let mut alive = vec![true; k];
    let mut left = k;
    let mut stages = Vec::new();
    while left > 1 {
        // Rake: leaves fold into their neighbor; of two adjacent leaves the
        // higher id survives.
        let mut stage: Vec<Option<Merge>> = (0..k).map(|_| None).collect();
        let leaves: Vec<usize> = (0..k).filter(|&v| alive[v] && adj[v].len() == 1).collect();
        for &v in &leaves {
            let u = adj[v][0];
            if adj[u].len() == 1 && u < v {
                continue;
            }
            let m = stage[u].get_or_insert_with(|| Merge { members: vec![u], weights: vec![w[u]] });
            m.members.push(v);
            m.weights.push(w[v]);
        }
        for u in 0..k {
            if let Some(m) = &stage[u] {
                for &v in &m.members[1..] {
                    alive[v] = false;
                    left -= 1;
                    adj[u].retain(|&x| x != v);
                    adj[v].clear();
                    w[u] += w[v];
                }
            }
        }
        stages.push(stage);

        // Compress: maximal runs of at least two degree-two vertices.
        let mut stage: Vec<Option<Merge>> = (0..k).map(|_| None).collect();
        let mut seen = vec![false; k];
        for s in 0..k {
            if !alive[s] || adj[s].len() != 2 || seen[s] {
                continue;
            }
            let mut run = vec![s];
            seen[s] = true;
            let mut ends = Vec::new();
            for dir in 0..2 {
                let (mut prev, mut cur) = (s, adj[s][dir]);
                while adj[cur].len() == 2 && !seen[cur] {
                    seen[cur] = true;
                    run.push(cur);
                    let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                    prev = cur;
                    cur = next;
                }
                ends.push((prev, cur));
            }
            if run.len() < 2 {
                continue;
            }
            run.sort_unstable();
            let keep = run[0];
            let weights = run.iter().map(|&v| w[v]).collect();
            for &(inner, outer) in &ends {
                adj[outer].retain(|&x| x != inner);
                adj[outer].push(keep);
            }
            adj[keep] = ends.iter().map(|e| e.1).collect();
            for &v in &run[1..] {
                alive[v] = false;
                left -= 1;
                w[keep] += w[v];
                adj[v].clear();
            }
            stage[keep] = Some(Merge { members: run, weights });
        }
        stages.push(stage);
    }
    stages
}

/// Draws a vertex of the tree with probability `w[v] / Σ w`. Returns the
/// vertex and the number of Rake/Compress iterations used.
pub fn sample_tree<R: Rng>(k: usize, edges: &[(usize, usize)], w: &[f64], mode: SamplingMode, rng: &mut R) -> (usize, usize) {
    let gather = match mode {
        SamplingMode::Gather => true,
        SamplingMode::RakeCompress => false,
        SamplingMode::Auto { threshold } => k < threshold,
    };
    if gather {
        return (pick(w, rng), 0);
    }
    let stages = decompose(k, edges, w);
    let mut v = (0..k).find(|&v| {
        let mut alive = true;
        for st in &stages {
            for m in st.iter().flatten() {
                if m.members[1..].contains(&v) {
                    alive = false;
                }
            }
        }
        alive
    });
    for st in stages.iter().rev() {
        let u = v.unwrap();
        if let Some(m) = &st[u] {
            v = Some(m.members[pick(&m.weights, rng)]);
        }
    }
    (v.unwrap_or(0), stages.len() / 2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Root child per tree (chosen child for deficient trees).
    pub roots: Vec<usize>,
    /// Children chosen to receive small gifts.
    pub chosen: Vec<usize>,
    /// Scaled and downscaled small-gift part per instance edge.
    pub z: Vec<f64>,
    /// `V_S(C_i) / level` per deficient tree.
    pub reserves: Vec<f64>,
    /// Chosen children whose scale-up had to stop at an edge reaching one.
    pub clipped: usize,
    /// Largest `Σ_c z_cs` over small gifts.
    pub max_load: f64,
    pub rake_iterations: usize,
}

/// Draws the chosen children, scales each chosen child's small part to
/// value `level` (or until an edge reaches one) and divides by `β`.
pub fn select_children<R: Rng>(
    inst: &Instance,
    frac: &FractionalSolution,
    forest: &ClusterForest,
    beta: f64,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<Selection, SantaError> {
    let vs = frac.small_value(inst);
    let mut max_y = vec![0.0f64; inst.n_children()];
    for (e, &(c, _)) in inst.edges().iter().enumerate() {
        max_y[c] = max_y[c].max(frac.y[e]);
    }
    let mut roots = Vec::with_capacity(forest.trees.len());
    let mut chosen = Vec::new();
    let mut reserves = Vec::new();
    let mut rake_iterations = 0;
    for (i, t) in forest.trees.iter().enumerate() {
        if let TreeKind::BigLeaf { child, .. } = t.kind {
            roots.push(child);
            continue;
        }
        let w: Vec<f64> = t.children.iter().map(|&c| vs[c]).collect();
        let total: f64 = crate::fsum::fsum(w.iter().copied());
        if !(total > 0.0) {
            return Err(SantaError::EmptyCluster(i));
        }
        reserves.push(total / frac.level);
        let mut local = std::collections::HashMap::new();
        for (k, &c) in t.children.iter().enumerate() {
            local.insert(c, k);
        }
        // Children joined through a degree-two gift.
        let mut by_gift: std::collections::HashMap<usize, Vec<usize>> = Default::default();
        for &e in &forest.kept {
            let (c, g) = inst.edges()[e];
            if let Some(&k) = local.get(&c) {
                by_gift.entry(g).or_default().push(k);
            }
        }
        let mut vedges: Vec<(usize, usize)> = by_gift.values().filter(|l| l.len() == 2).map(|l| (l[0], l[1])).collect();
        vedges.sort_unstable();
        let vertices = t.children.len() + t.gifts.len();
        let mode = match mode {
            SamplingMode::Auto { threshold } if vertices < threshold => SamplingMode::Gather,
            SamplingMode::Auto { .. } => SamplingMode::RakeCompress,
            m => m,
        };
        let (k, iters) = sample_tree(t.children.len(), &vedges, &w, mode, rng);
        rake_iterations = rake_iterations.max(iters);
        roots.push(t.children[k]);
        chosen.push(t.children[k]);
    }
    let mut z = vec![0.0; inst.edges().len()];
    let mut clipped = 0;
    let mut is_chosen = vec![false; inst.n_children()];
    for &c in &chosen {
        is_chosen[c] = true;
        let mut scale = frac.level / vs[c];
        if scale * max_y[c] > 1.0 {
            scale = 1.0 / max_y[c];
            clipped += 1;
        }
        for &g in inst.child_gifts(c) {
            let e = edge_index(inst, c, g);
            z[e] = (frac.y[e] * scale).min(1.0) / beta;
        }
    }
    let mut load = vec![0.0; inst.n_gifts()];
    for (e, &(_, g)) in inst.edges().iter().enumerate() {
        load[g] += z[e];
    }
    let max_load = load.into_iter().fold(0.0, f64::max);
    Ok(Selection { roots, chosen, z, reserves, clipped, max_load, rake_iterations })
}

pub(crate) fn edge_index(inst: &Instance, c: usize, g: usize) -> usize {
    inst.edges().binary_search(&(c, g)).expect("desire edge")
}
