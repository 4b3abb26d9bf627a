//! Rooting a forest by iterated Rake and Compress.
//!
//! Rake removes every vertex of degree at most one; the removed vertex (and
//! the interior of the virtual edge it hangs on) points toward the surviving
//! endpoint. Compress replaces maximal runs of degree-two vertices by one
//! virtual edge whose orientation is fixed later, when one of its endpoints
//! is raked. A vertex that ends with degree zero becomes the root of its tree.

use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    pub parent: Vec<Option<usize>>,
    /// One root per connected component (isolated vertices included), increasing.
    pub roots: Vec<usize>,
    /// Rake + Compress iterations until every vertex was decided.
    pub iterations: u32,
}

impl RootedForest {
    pub fn root_of(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v] {
            v = p;
        }
        v
    }
}

struct VEdge {
    path: Vec<usize>,
    alive: bool,
}

/// Roots every tree of the forest `edges` on vertices `0..n`. A vertex in
/// `designated` is never raked and therefore becomes the root of its tree.
pub fn root_forest(n: usize, edges: &[(usize, usize)], designated: &[usize]) -> Result<RootedForest, SimError> {
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(d: &mut [usize], mut x: usize) -> usize {
        while d[x] != x {
            d[x] = d[d[x]];
            x = d[x];
        }
        x
    }
    for (id, &(a, b)) in edges.iter().enumerate() {
        if a >= n || b >= n {
            return Err(SimError::UnknownNode(a.max(b), n));
        }
        let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
        if ra == rb {
            return Err(SimError::Cyclic(id));
        }
        dsu[ra] = rb;
    }
    let mut keep = vec![false; n];
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for &d in designated {
        if d >= n {
            return Err(SimError::UnknownNode(d, n));
        }
        let r = find(&mut dsu, d);
        if let Some(other) = owner[r] {
            if other != d {
                return Err(SimError::TwoRoots(other.min(d), other.max(d)));
            }
        }
        owner[r] = Some(d);
        keep[d] = true;
    }

    let mut ves: Vec<VEdge> = edges.iter().map(|&(a, b)| VEdge { path: vec![a, b], alive: true }).collect();
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, &(a, b)) in edges.iter().enumerate() {
        inc[a].push(id);
        inc[b].push(id);
    }
    let mut live = vec![true; n];
    let mut parent = vec![None; n];
    let mut roots = Vec::new();
    let mut iterations = 0u32;
    let other_end = |ve: &VEdge, x: usize| if ve.path[0] == x { *ve.path.last().unwrap() } else { ve.path[0] };

    while live.iter().any(|&l| l) {
        iterations += 1;
        // Rake.
        let deg: Vec<usize> = inc.iter().map(Vec::len).collect();
        let mut raked = Vec::new();
        for v in 0..n {
            if !live[v] {
                continue;
            }
            if deg[v] == 0 {
                roots.push(v);
                live[v] = false;
                continue;
            }
            if deg[v] != 1 || keep[v] {
                continue;
            }
            let e = inc[v][0];
            let w = other_end(&ves[e], v);
            // An isolated virtual edge: the higher id (or the designated end) survives.
            if deg[w] == 1 && !keep[w] && w < v {
                continue;
            }
            raked.push((v, e));
        }
        for (v, e) in raked {
            let mut path = ves[e].path.clone();
            if path[0] != v {
                path.reverse();
            }
            for k in 0..path.len() - 1 {
                parent[path[k]] = Some(path[k + 1]);
                live[path[k]] = false;
            }
            ves[e].alive = false;
            let w = *path.last().unwrap();
            inc[w].retain(|&x| x != e);
            inc[v].clear();
        }
        // Compress maximal runs of degree-two vertices.
        let mut in_run = vec![false; n];
        for s in 0..n {
            if !live[s] || keep[s] || inc[s].len() != 2 || in_run[s] {
                continue;
            }
            // Walk to one end of the run, then collect the full path.
            let mut start = s;
            let mut via = inc[s][0];
            loop {
                let nxt = other_end(&ves[via], start);
                if keep[nxt] || inc[nxt].len() != 2 || nxt == s {
                    break;
                }
                let e2 = if inc[nxt][0] == via { inc[nxt][1] } else { inc[nxt][0] };
                start = nxt;
                via = e2;
            }
            // `start` is the run vertex adjacent to an end; walk the other way.
            let mut cur = start;
            let mut e_in = via;
            let first_end = other_end(&ves[e_in], cur);
            let mut full: Vec<usize> = oriented(&ves[e_in].path, first_end);
            let mut members = Vec::new();
            loop {
                members.push(cur);
                in_run[cur] = true;
                let e_out = if inc[cur][0] == e_in { inc[cur][1] } else { inc[cur][0] };
                let seg = oriented(&ves[e_out].path, cur);
                full.extend_from_slice(&seg[1..]);
                let nxt = *seg.last().unwrap();
                e_in = e_out;
                if keep[nxt] || inc[nxt].len() != 2 || in_run[nxt] {
                    break;
                }
                cur = nxt;
            }
            let a = full[0];
            let b = *full.last().unwrap();
            let mut removed: Vec<usize> = members.iter().flat_map(|&m| inc[m].clone()).collect();
            removed.sort_unstable();
            removed.dedup();
            for &e in &removed {
                ves[e].alive = false;
            }
            for &m in &members {
                inc[m].clear();
            }
            let id = ves.len();
            ves.push(VEdge { path: full, alive: true });
            for x in [a, b] {
                inc[x].retain(|e| !removed.contains(e));
                inc[x].push(id);
            }
            for &m in &members {
                // Interior vertices are decided when the new edge is raked.
                live[m] = false;
            }
        }
        // Interior vertices of live virtual edges are pending, not live.
        debug_assert!(ves.iter().filter(|e| e.alive).all(|e| e.path.len() >= 2));
    }
    roots.sort_unstable();
    Ok(RootedForest { parent, roots, iterations })
}

fn oriented(path: &[usize], from: usize) -> Vec<usize> {
    if path[0] == from {
        path.to_vec()
    } else {
        path.iter().rev().copied().collect()
    }
}
