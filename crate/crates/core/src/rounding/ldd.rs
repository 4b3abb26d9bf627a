//! Low-diameter decomposition by exponentially shifted shortest paths.
//!
//! Every vertex `u` draws `δ_u ~ Exp(β)` and each vertex joins the center
//! minimizing `dist(u, v) - δ_u` (ties by center id). Clusters are
//! connected, and an edge is cut with probability `O(β)`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LddClustering {
    /// Cluster index per vertex.
    pub cluster_of: Vec<usize>,
    pub centers: Vec<usize>,
    /// Hop radius of each cluster around its center.
    pub radius: Vec<usize>,
    /// Indices of edges whose endpoints lie in different clusters.
    pub cut_edges: Vec<usize>,
}

impl LddClustering {
    pub fn cut_fraction(&self, m: usize) -> f64 {
        if m == 0 { 0.0 } else { self.cut_edges.len() as f64 / m as f64 }
    }

    pub fn max_radius(&self) -> usize {
        self.radius.iter().copied().max().unwrap_or(0)
    }

    /// Each connected component as one cluster.
    pub fn components(n: usize, edges: &[(usize, usize)]) -> Self {
        let adj = adjacency(n, edges);
        let mut cluster_of = vec![usize::MAX; n];
        let mut centers = Vec::new();
        let mut radius = Vec::new();
        for s in 0..n {
            if cluster_of[s] != usize::MAX {
                continue;
            }
            let id = centers.len();
            let mut far = 0;
            let mut q = VecDeque::from([(s, 0usize)]);
            cluster_of[s] = id;
            while let Some((u, d)) = q.pop_front() {
                far = far.max(d);
                for &v in &adj[u] {
                    if cluster_of[v] == usize::MAX {
                        cluster_of[v] = id;
                        q.push_back((v, d + 1));
                    }
                }
            }
            centers.push(s);
            radius.push(far);
        }
        LddClustering { cluster_of, centers, radius, cut_edges: Vec::new() }
    }
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

#[derive(PartialEq)]
struct Entry {
    key: f64,
    hops: usize,
    center: usize,
    v: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed for a min-heap on (key, center).
    fn cmp(&self, o: &Self) -> Ordering {
        o.key.total_cmp(&self.key).then(o.center.cmp(&self.center)).then(o.v.cmp(&self.v))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// One shifted-shortest-path clustering of the graph on `0..n`.
pub fn ldd<R: Rng>(n: usize, edges: &[(usize, usize)], beta: f64, rng: &mut R) -> LddClustering {
    let exp = Exp::new(beta).expect("positive rate");
    let shift: Vec<f64> = (0..n).map(|_| exp.sample(rng)).collect();
    let adj = adjacency(n, edges);
    let mut cluster_center = vec![usize::MAX; n];
    let mut hops = vec![0usize; n];
    let mut heap: BinaryHeap<Entry> = (0..n).map(|u| Entry { key: -shift[u], hops: 0, center: u, v: u }).collect();
    while let Some(Entry { hops: h, center, v, .. }) = heap.pop() {
        if cluster_center[v] != usize::MAX {
            continue;
        }
        cluster_center[v] = center;
        hops[v] = h;
        for &w in &adj[v] {
            if cluster_center[w] == usize::MAX {
                heap.push(Entry { key: (h + 1) as f64 - shift[center], hops: h + 1, center, v: w });
            }
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut centers = Vec::new();
    let mut radius: Vec<usize> = Vec::new();
    let mut cluster_of = vec![0usize; n];
    for v in 0..n {
        let c = cluster_center[v];
        if index[c] == usize::MAX {
            index[c] = centers.len();
            centers.push(c);
            radius.push(0);
        }
        cluster_of[v] = index[c];
        radius[index[c]] = radius[index[c]].max(hops[v]);
    }
    let cut_edges = (0..edges.len()).filter(|&i| cluster_of[edges[i].0] != cluster_of[edges[i].1]).collect();
    LddClustering { cluster_of, centers, radius, cut_edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clusters_are_connected_and_clique_is_whole() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let clique: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
        let mut single = 0;
        for _ in 0..50 {
            let c = ldd(6, &clique, 0.1, &mut rng);
            single += usize::from(c.centers.len() == 1);
        }
        assert!(single >= 40, "{single}");
        let path: Vec<(usize, usize)> = (0..199).map(|i| (i, i + 1)).collect();
        let c = ldd(200, &path, 0.1, &mut rng);
        for k in 0..c.centers.len() {
            let members: Vec<usize> = (0..200).filter(|&v| c.cluster_of[v] == k).collect();
            assert_eq!(members.len(), members.last().unwrap() - members[0] + 1, "cluster {k} not contiguous");
        }
    }
}
