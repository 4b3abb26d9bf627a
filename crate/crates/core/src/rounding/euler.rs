//! Partition of an even-degree graph into edge-disjoint simple cycles.

use super::RoundingError;

/// Splits the edges of a graph in which every vertex has even degree into
/// simple cycles. Each cycle lists edge indices in walk order. Walks along
/// unused edges and cuts a cycle off whenever the walk revisits a vertex on
/// its current stack. Parallel edges form 2-cycles.
pub fn cycle_decompose(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>, RoundingError> {
    let mut inc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(a, b)) in edges.iter().enumerate() {
        if a == b {
            return Err(RoundingError::SelfLoop(id));
        }
        inc[a].push((id, b));
        inc[b].push((id, a));
    }
    if let Some(v) = (0..n).find(|&v| inc[v].len() % 2 == 1) {
        return Err(RoundingError::OddDegree(v));
    }
    let mut used = vec![false; edges.len()];
    let mut next = vec![0usize; n];
    let mut pos: Vec<Option<usize>> = vec![None; n];
    let mut cycles = Vec::new();
    for s in 0..n {
        let mut stack_v = vec![s];
        let mut stack_e: Vec<usize> = Vec::new();
        pos[s] = Some(0);
        while let Some(&v) = stack_v.last() {
            while next[v] < inc[v].len() && used[inc[v][next[v]].0] {
                next[v] += 1;
            }
            let Some(&(id, w)) = inc[v].get(next[v]) else {
                // Only the start can run dry: every other stacked vertex was
                // entered by one edge and has even degree.
                debug_assert_eq!(stack_v.len(), 1);
                pos[v] = None;
                stack_v.pop();
                continue;
            };
            used[id] = true;
            if let Some(k) = pos[w] {
                let mut cycle: Vec<usize> = stack_e.drain(k..).collect();
                cycle.push(id);
                for x in stack_v.drain(k + 1..) {
                    pos[x] = None;
                }
                cycles.push(cycle);
            } else {
                pos[w] = Some(stack_v.len());
                stack_v.push(w);
                stack_e.push(id);
            }
        }
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert!(cycle_decompose(0, &[]).unwrap().is_empty());
        let c4 = [(0, 1), (1, 2), (2, 3), (3, 0)];
        assert_eq!(cycle_decompose(4, &c4).unwrap(), vec![vec![0, 1, 2, 3]]);
        let bowtie = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)];
        let cycles = cycle_decompose(5, &bowtie).unwrap();
        assert_eq!(cycles.len(), 2);
        assert!(matches!(cycle_decompose(2, &[(0, 1)]), Err(RoundingError::OddDegree(0))));
    }
}
