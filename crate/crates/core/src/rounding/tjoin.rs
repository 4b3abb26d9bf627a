//! Acyclic T-joins from BFS trees by subtree parity.

use std::collections::VecDeque;

use super::RoundingError;

/// Returns edge indices `H` such that `deg_H(v)` is odd exactly for `v ∈ T`.
/// Each component is handled on a BFS tree rooted at its lowest vertex; a
/// tree edge to a parent is taken when the subtree below holds an odd
/// number of `T` vertices. The result lies in the forest, so it is acyclic.
pub fn t_join(n: usize, edges: &[(usize, usize)], t: &[bool]) -> Result<Vec<usize>, RoundingError> {
    assert_eq!(t.len(), n);
    let mut inc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(a, b)) in edges.iter().enumerate() {
        inc[a].push((id, b));
        inc[b].push((id, a));
    }
    let mut parent_edge: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut join = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut order = vec![root];
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            for &(id, v) in &inc[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent_edge[v] = Some(id);
                    order.push(v);
                    q.push_back(v);
                }
            }
        }
        let mut odd: Vec<bool> = vec![false; n];
        for &v in &order {
            odd[v] = t[v];
        }
        for &v in order.iter().rev() {
            if let Some(id) = parent_edge[v] {
                if odd[v] {
                    join.push(id);
                    let (a, b) = edges[id];
                    let p = if a == v { b } else { a };
                    odd[p] = !odd[p];
                }
            } else if odd[v] {
                return Err(RoundingError::OddTerminals { component_root: v });
            }
        }
    }
    join.sort_unstable();
    Ok(join)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(t_join(3, &[(0, 1), (1, 2)], &[false; 3]).unwrap(), Vec::<usize>::new());
        assert_eq!(t_join(3, &[(0, 1), (1, 2)], &[true, false, true]).unwrap(), vec![0, 1]);
        let star = [(0, 1), (0, 2), (0, 3)];
        assert_eq!(t_join(4, &star, &[false, true, true, false]).unwrap(), vec![0, 1]);
        assert!(t_join(2, &[(0, 1)], &[true, false]).is_err());
    }
}
