use num::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use santa_congest::rounding::{
    cycle_decompose, degree_sums, has_cycle, round_cycles, t_join, RoundingConfig, Weight, WeightedGraph,
};

fn bipartite(seed: u64, n: usize, density: f64) -> (usize, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left = n / 2;
    let mut edges = Vec::new();
    for a in 0..left {
        for b in left..n {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}

fn check<W: Weight>(g: &WeightedGraph<W>, seed: u64, exact: bool) {
    let r = round_cycles(g, &RoundingConfig { seed, ..Default::default() }, "t").unwrap();
    let before = g.degree_sums();
    let after = degree_sums(g.n, &g.edges, &r.w);
    for v in 0..g.n {
        if exact {
            assert!(before[v] == after[v], "vertex {v}");
        } else {
            assert!((before[v].to_f64() - after[v].to_f64()).abs() <= 1e-9, "vertex {v}");
        }
    }
    for e in 0..g.edges.len() {
        assert!(r.w[e] >= W::zero() && r.w[e] <= g.cap[e]);
    }
    let frac: Vec<usize> = (0..g.edges.len()).filter(|&e| !r.w[e].is_integral(&g.cap[e])).collect();
    assert!(!has_cycle(g.n, &g.edges, frac));
}

#[test]
fn large_dense_float_and_rational() {
    for (seed, density) in [(1, 0.05), (2, 0.2), (3, 0.5)] {
        let (n, edges) = bipartite(seed, 200, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let wf: Vec<f64> = edges.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
        check(&WeightedGraph::unit(n, edges.clone(), wf).unwrap(), seed, false);
        let wq: Vec<BigRational> = edges
            .iter()
            .map(|_| {
                let d: i64 = rng.gen_range(2..=12);
                BigRational::new(rng.gen_range(0..=d).into(), d.into())
            })
            .collect();
        check(&WeightedGraph::unit(n, edges, wq).unwrap(), seed, true);
    }
}

#[test]
fn value_caps_are_respected() {
    let (n, edges) = bipartite(9, 60, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cap: Vec<f64> = edges.iter().map(|_| rng.gen_range(1..=5) as f64).collect();
    let w: Vec<f64> = cap.iter().map(|c| c * rng.gen_range(0.0..1.0)).collect();
    check(&WeightedGraph::new(n, edges, w, cap).unwrap(), 9, false);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_rounding_conserves(seed in 0u64..10_000, n in 2usize..40, density in 0.05f64..0.9) {
        let (n, edges) = bipartite(seed, n, density);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = edges.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
        check(&WeightedGraph::unit(n, edges, w).unwrap(), seed, false);
    }

    #[test]
    fn t_join_parity(seed in 0u64..10_000, n in 1usize..30) {
        let (n, edges) = bipartite(seed, n, 0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        // Fix parity per component by dropping one terminal where odd.
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize { if c[x] == x { x } else { let r = find(c, c[x]); c[x] = r; r } }
        for &(a, b) in &edges { let (ra, rb) = (find(&mut comp, a), find(&mut comp, b)); comp[ra] = rb; }
        let mut count = vec![0usize; n];
        for v in 0..n { if t[v] { count[find(&mut comp, v)] += 1; } }
        for v in 0..n { let r = find(&mut comp, v); if t[v] && count[r] % 2 == 1 { t[v] = false; count[r] -= 1; } }
        let h = t_join(n, &edges, &t).unwrap();
        let mut deg = vec![0usize; n];
        for &e in &h { deg[edges[e].0] += 1; deg[edges[e].1] += 1; }
        for v in 0..n { prop_assert_eq!(deg[v] % 2 == 1, t[v]); }
        prop_assert!(!has_cycle(n, &edges, h.iter().copied()));
        // The complement of a T-join for the odd-degree set is Eulerian.
        let odd: Vec<bool> = (0..n).map(|v| edges.iter().filter(|e| e.0 == v || e.1 == v).count() % 2 == 1).collect();
        let j = t_join(n, &edges, &odd).unwrap();
        let rest: Vec<(usize, usize)> = (0..edges.len()).filter(|e| !j.contains(e)).map(|e| edges[e]).collect();
        let cycles = cycle_decompose(n, &rest).unwrap();
        prop_assert_eq!(cycles.iter().map(Vec::len).sum::<usize>(), rest.len());
    }
}
