use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use santa_congest::lp::{run_kernel, simulate_kernel, MixedLP, SolverConfig};
use santa_congest::sim::primitives::{MaxU64, SumU64};
use santa_congest::sim::{
    aggregate, bfs_tree, elect_leader, root_forest, run_protocol, CongestNetwork, NetConfig, NodeId, Payload, SimError,
    SimMode,
};

/// Random connected graph: a random spanning tree plus extra edges.
fn connected(n: usize, extra: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(extra) && !edges.contains(&(a, b)) {
                edges.push((a, b));
            }
        }
    }
    edges
}

fn net(n: usize, edges: &[(usize, usize)], strict: bool) -> CongestNetwork {
    CongestNetwork::from_edges(n, edges, NetConfig { strict, ..NetConfig::default() }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn primitives_agree_across_modes(n in 1usize..40, extra in 0.0f64..0.3, seed in 0u64..1000, strict: bool) {
        let edges = connected(n, extra, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let labels: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1u64 << 40)).collect();
        let vals: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1u64 << 50)).collect();
        let mut outs = Vec::new();
        for mode in [SimMode::Faithful, SimMode::FastPath] {
            let mut g = net(n, &edges, strict);
            let (leader, s0) = elect_leader(&mut g, Some(&labels), mode).unwrap();
            let (tree, s1) = bfs_tree(&mut g, leader, mode).unwrap();
            let (sum, s2) = aggregate(&mut g, &tree, vals.iter().map(|&v| SumU64(v)).collect(), mode).unwrap();
            let (max, s3) = aggregate(&mut g, &tree, vals.iter().map(|&v| MaxU64(v)).collect(), mode).unwrap();
            prop_assert!(tree.unreachable().is_empty());
            prop_assert_eq!(sum.0, vals.iter().sum::<u64>());
            prop_assert_eq!(max.0, *vals.iter().max().unwrap());
            let best = (0..n).max_by_key(|&v| (labels[v], v)).unwrap();
            prop_assert_eq!(leader, NodeId(best as u32));
            if strict {
                prop_assert_eq!(g.stats().budget_violations, 0);
                prop_assert!(g.stats().max_bits_on_any_edge_per_round <= g.bit_budget());
            }
            outs.push((leader, tree, sum.0, max.0, [s0, s1, s2, s3], g.stats()));
        }
        prop_assert_eq!(&outs[0], &outs[1]);
    }

    #[test]
    fn rooting_reaches_one_root_per_tree(n in 1usize..60, seed in 0u64..1000, drop in 0.0f64..0.4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            let p = rng.gen_range(0..v);
            if !rng.gen_bool(drop) {
                edges.push((p, v));
            }
        }
        let want: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.1)).collect();
        let r = match root_forest(n, &edges, &want) {
            Ok(r) => r,
            // Two wanted roots in one tree.
            Err(SimError::TwoRoots(..)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(d: &mut [usize], mut x: usize) -> usize {
            while d[x] != x { d[x] = d[d[x]]; x = d[x]; }
            x
        }
        for &(a, b) in &edges {
            let (x, y) = (find(&mut comp, a), find(&mut comp, b));
            comp[x] = y;
        }
        for v in 0..n {
            let root = r.root_of(v);
            prop_assert_eq!(find(&mut comp, v), find(&mut comp, root));
            prop_assert!(r.roots.contains(&root));
            if let Some(p) = r.parent[v] {
                prop_assert!(edges.contains(&(v.min(p), v.max(p))));
            }
        }
        for &w in &want {
            prop_assert_eq!(r.parent[w], None);
        }
        let mut seen: Vec<usize> = r.roots.iter().map(|&x| find(&mut comp, x)).collect();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), r.roots.len());
    }
}

#[test]
fn cyclic_forest_is_rejected() {
    assert!(matches!(root_forest(3, &[(0, 1), (1, 2), (0, 2)], &[]), Err(SimError::Cyclic(2))));
}

#[derive(Debug, Clone)]
struct Blob(u64);

impl Payload for Blob {
    fn bit_len(&self) -> u64 {
        self.0
    }
}

#[test]
fn oversized_messages_are_framed_in_strict_mode() {
    let edges = connected(12, 0.2, 5);
    let mut g = net(12, &edges, true);
    let budget = g.bit_budget();
    // Every node sends one message of 5 budgets to each neighbor, once.
    let mut got = vec![0usize; 12];
    let s = run_protocol(&mut g, &mut got, 100, |ctx, st: &mut usize, inbox: &[_], out| {
        *st += inbox.iter().map(|e: &santa_congest::sim::Envelope<Blob>| usize::from(e.msg.0 == 5 * budget)).sum::<usize>();
        if ctx.round == 1 {
            for &u in ctx.neighbors {
                out.send(u, Blob(5 * budget));
            }
        }
    })
    .unwrap();
    assert_eq!(s.budget_violations, 0);
    assert!(s.max_bits_on_any_edge_per_round <= budget);
    assert!(s.rounds_elapsed >= 5);
    for v in 0..12 {
        assert_eq!(got[v], g.neighbors(NodeId(v as u32)).len());
    }
}

#[test]
fn raw_rounds_record_violations_without_truncating() {
    let mut g = net(2, &[(0, 1)], true);
    let budget = g.bit_budget();
    let mut mb = santa_congest::sim::Mailbox::new(2);
    let mut st = vec![(); 2];
    let s = g
        .run_round(&mut st, &mut mb, |ctx, _, _, out| {
            if ctx.id == NodeId(0) {
                out.send(NodeId(1), Blob(budget + 1));
            }
        })
        .unwrap();
    assert_eq!(s.budget_violations, 1);
    assert_eq!(mb.inbox(NodeId(1))[0].msg.0, budget + 1);
}

#[test]
fn simulated_kernel_matches_sequential_on_random_lps() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..12 {
        let (n_p, n_c, m) = (rng.gen_range(1..5), rng.gen_range(1..5), rng.gen_range(1..5));
        let mut p = Vec::new();
        let mut c = Vec::new();
        for i in 0..m {
            p.push((rng.gen_range(0..n_p), i, rng.gen_range(0.1..2.0)));
            c.push((rng.gen_range(0..n_c), i, rng.gen_range(0.1..2.0)));
        }
        let lp = MixedLP::unit(n_p, n_c, m, &p, &c).unwrap();
        for quantize in [false, true] {
            let cfg = SolverConfig { quantize, ..SolverConfig::default() };
            let seq = run_kernel(&lp, 0.5, &cfg).unwrap();
            let net_cfg = NetConfig { strict: quantize, ..NetConfig::default() };
            let a = simulate_kernel(&lp, 0.5, &cfg, net_cfg, SimMode::Faithful, false, "t").unwrap();
            let b = simulate_kernel(&lp, 0.5, &cfg, net_cfg, SimMode::FastPath, false, "t").unwrap();
            assert_eq!(a.run, seq, "trial {trial}");
            assert_eq!(b.run, seq, "trial {trial}");
            assert_eq!(a.stats, b.stats, "trial {trial}");
            if quantize {
                assert_eq!(a.total.budget_violations, 0, "trial {trial}");
            }
        }
    }
}
