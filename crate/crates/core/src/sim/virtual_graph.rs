//! Contraction of degree-two paths into single virtual edges.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContractRule {
    /// Contract every maximal path of degree-two interior vertices.
    All,
    /// Contract only paths with an odd number of base edges; even paths stay
    /// as individual direct edges. Keeps bipartite graphs bipartite.
    OddOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualEdge {
    pub u: usize,
    pub v: usize,
    /// Base vertices from `u` to `v`.
    pub path: Vec<usize>,
    /// Indices into the input edge list, in path order.
    pub base_edges: Vec<usize>,
    pub contracted: bool,
}

impl VirtualEdge {
    pub fn parity(&self) -> usize {
        self.base_edges.len() % 2
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualGraph {
    pub n: usize,
    /// Base vertices that survive as virtual nodes, increasing.
    pub nodes: Vec<usize>,
    pub edges: Vec<VirtualEdge>,
    /// Every ceil(sqrt n)-th interior vertex of long contracted paths.
    pub shortcuts: Vec<usize>,
}

impl VirtualGraph {
    /// All base edge indices covered by the virtual edges, increasing.
    pub fn expand(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.edges.iter().flat_map(|e| e.base_edges.iter().copied()).collect();
        out.sort_unstable();
        out
    }
}

/// Contracts maximal paths whose interior vertices have degree two in the
/// subgraph `edges` on vertices `0..n`. Components that are pure cycles are
/// split at their two lowest-id vertices; a path that would close on its own
/// start is split at its lowest-id interior vertex, so no virtual self-loop
/// appears.
pub fn compress_virtual_graph(n: usize, edges: &[(usize, usize)], rule: ContractRule) -> VirtualGraph {
    let mut inc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(a, b)) in edges.iter().enumerate() {
        inc[a].push((id, b));
        inc[b].push((id, a));
    }
    let mut anchor: Vec<bool> = inc.iter().map(|l| !l.is_empty() && l.len() != 2).collect();
    // Pure cycles: components with no anchor at all.
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] || inc[s].is_empty() {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let x = comp[i];
            i += 1;
            for &(_, y) in &inc[x] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                }
            }
        }
        if comp.iter().all(|&x| !anchor[x]) {
            comp.sort_unstable();
            anchor[comp[0]] = true;
            if comp.len() > 1 {
                anchor[comp[1]] = true;
            }
        }
    }
    let paths = loop {
        match walk_paths(&inc, &anchor, edges.len()) {
            Ok(paths) => break paths,
            Err(split) => anchor[split] = true,
        }
    };
    let side = (n.max(1) as f64).sqrt().ceil() as usize;
    let mut out_edges = Vec::new();
    let mut is_node = anchor.clone();
    let mut shortcuts = Vec::new();
    for (path, base) in paths {
        let contract = base.len() > 1 && (rule == ContractRule::All || base.len() % 2 == 1);
        if contract {
            let interior = &path[1..path.len() - 1];
            if interior.len() >= side {
                shortcuts.extend(interior.iter().skip(side - 1).step_by(side).copied());
            }
            out_edges.push(VirtualEdge { u: path[0], v: *path.last().unwrap(), path, base_edges: base, contracted: true });
        } else {
            for (k, &e) in base.iter().enumerate() {
                is_node[path[k]] = true;
                is_node[path[k + 1]] = true;
                out_edges.push(VirtualEdge {
                    u: path[k],
                    v: path[k + 1],
                    path: vec![path[k], path[k + 1]],
                    base_edges: vec![e],
                    contracted: false,
                });
            }
        }
    }
    shortcuts.sort_unstable();
    VirtualGraph { n, nodes: (0..n).filter(|&v| is_node[v]).collect(), edges: out_edges, shortcuts }
}

type Walk = (Vec<usize>, Vec<usize>);

/// Walks from every anchor through non-anchors. Errors with a vertex to
/// promote when a walk returns to its own start.
fn walk_paths(inc: &[Vec<(usize, usize)>], anchor: &[bool], m: usize) -> Result<Vec<Walk>, usize> {
    let mut used = vec![false; m];
    let mut paths = Vec::new();
    for s in 0..inc.len() {
        if !anchor[s] {
            continue;
        }
        for &(e0, y0) in &inc[s] {
            if used[e0] {
                continue;
            }
            used[e0] = true;
            let mut path = vec![s, y0];
            let mut base = vec![e0];
            let mut cur = y0;
            let mut via = e0;
            while !anchor[cur] {
                let &(e, y) = inc[cur].iter().find(|(e, _)| *e != via).expect("degree-two vertex");
                used[e] = true;
                path.push(y);
                base.push(e);
                cur = y;
                via = e;
            }
            if cur == s && base.len() > 1 {
                return Err(*path[1..path.len() - 1].iter().min().expect("interior exists"));
            }
            if path[0] > cur {
                path.reverse();
                base.reverse();
            }
            paths.push((path, base));
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_of_five_vertices() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4)];
        let g = compress_virtual_graph(5, &edges, ContractRule::All);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].parity(), 0);
        assert_eq!(g.edges[0].path, vec![0, 1, 2, 3, 4]);
        assert_eq!(g.nodes, vec![0, 4]);
    }

    #[test]
    fn six_cycle_splits_at_two_anchors() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)];
        let g = compress_virtual_graph(6, &edges, ContractRule::All);
        assert!(g.edges.len() >= 2);
        assert!(g.edges.iter().all(|e| e.u != e.v));
        assert_eq!(g.expand(), (0..6).collect::<Vec<_>>());
        assert_eq!(g.nodes, vec![0, 1]);
    }

    #[test]
    fn no_degree_two_vertices_is_a_fixpoint() {
        let edges = [(0, 1), (0, 2), (0, 3)];
        let g = compress_virtual_graph(4, &edges, ContractRule::All);
        assert_eq!(g.edges.len(), 3);
        assert!(g.edges.iter().all(|e| !e.contracted));
    }

    #[test]
    fn lollipop_cycle_is_split_inside() {
        // Triangle 0-1-2 hanging at 0, plus pendant 0-3.
        let edges = [(0, 1), (1, 2), (2, 0), (0, 3)];
        let g = compress_virtual_graph(4, &edges, ContractRule::All);
        assert!(g.edges.iter().all(|e| e.u != e.v));
        assert_eq!(g.expand(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn odd_only_keeps_even_paths() {
        let edges = [(0, 1), (1, 2), (0, 3), (0, 4), (2, 5), (2, 6)];
        let g = compress_virtual_graph(7, &edges, ContractRule::OddOnly);
        assert!(g.edges.iter().all(|e| !e.contracted));
        let h = compress_virtual_graph(7, &edges, ContractRule::All);
        assert_eq!(h.edges.iter().filter(|e| e.contracted).count(), 1);
    }
}
