use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use santa_congest::instances::{gen_path, gen_random, gen_scn, gen_sparsification_example, Instance, PathVariant, RandomParams};
use santa_congest::lp::SolverConfig;
use santa_congest::oracles::{brute_force_opt, BruteForceConfig};
use santa_congest::santa::{
    beta_for, binary_search_t, eliminate_big_cycles, prune_big_clusters, round_fractional, sample_tree, solve,
    SamplingMode, SantaConfig, TreeKind,
};
use santa_congest::rounding::RoundingConfig;

fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = RandomParams {
        children: rng.gen_range(1..=12),
        gifts: rng.gen_range(1..=14),
        min_value: 1,
        max_value: rng.gen_range(1..=30),
        density: rng.gen_range(0.15..0.7),
    };
    gen_random(&p, seed).unwrap()
}

#[test]
fn random_instances_meet_the_factor() {
    let cfg = SantaConfig::default();
    let mut sharpened = 0;
    for seed in 0..30 {
        let inst = random_instance(seed);
        let opt = brute_force_opt(&inst, &BruteForceConfig::default()).unwrap().units;
        let out = solve(&inst, seed, &cfg).unwrap();
        assert!(out.verification.valid, "seed {seed}: {:?}", out.verification.problems);
        assert!(out.t >= opt, "seed {seed}: T {} < OPT {opt}", out.t);
        assert!(out.retries <= 3);
        assert!(
            out.verification.min_units * out.alpha >= opt,
            "seed {seed}: got {} OPT {opt} alpha {} ledger {:?}",
            out.verification.min_units,
            out.alpha,
            out.ledger
        );
        assert!(out.guarantee_met, "seed {seed}: {:?}", out.ledger);
        sharpened += out.ledger.sharpenings;
    }
    eprintln!("sharpenings: {sharpened}");
}

#[test]
fn solve_is_deterministic() {
    let inst = random_instance(7);
    let cfg = SantaConfig::default();
    let a = solve(&inst, 11, &cfg).unwrap();
    let b = solve(&inst, 11, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.stats.to_csv_string(), b.stats.to_csv_string());
}

#[test]
fn paper_instances() {
    let cfg = SantaConfig::default();
    for n in 1..=8 {
        for v in [PathVariant::I2, PathVariant::I3] {
            let out = solve(&gen_path(v, n).unwrap(), 0, &cfg).unwrap();
            assert_eq!(out.verification.min_units, 1, "{v:?} n={n}");
        }
        let out = solve(&gen_path(PathVariant::I1, n).unwrap(), 0, &cfg).unwrap();
        assert_eq!((out.t, out.verification.min_units), (0, 0), "I1 n={n}");
    }
    let ex = gen_sparsification_example(3, 6).unwrap();
    let out = solve(&ex.instance, 0, &cfg).unwrap();
    assert!(out.verification.valid);
    assert!(out.verification.min_units * out.alpha >= 6 * ex.instance.scale());
}

#[test]
fn scn_runs_are_valid() {
    let cfg = SantaConfig::default();
    let (inst, _) = gen_scn(16, &[true, false, true, false], &[false, true, false, true]).unwrap();
    let out = solve(&inst, 3, &cfg).unwrap();
    assert!(out.verification.valid);
    assert_eq!(out.verification.min_units, 1, "{:?}", out.ledger);
}

#[test]
fn stagewise_audits() {
    let cfg = SantaConfig::default();
    for seed in 100..130 {
        let inst = random_instance(seed);
        let n = inst.n_children() + inst.n_gifts();
        let alpha = 4 * beta_for(n, 1.0);
        let (_, frac, _) = binary_search_t(&inst, alpha, 0.5, &SolverConfig::default()).unwrap();
        let Some(frac) = frac else { continue };
        let (x, _) = eliminate_big_cycles(&inst, &frac.x, &RoundingConfig { seed, ..Default::default() }, "t").unwrap();
        // Child and big-gift sums survive; positive edges form a forest.
        let (mut cs0, mut cs1) = (vec![0.0; inst.n_children()], vec![0.0; inst.n_children()]);
        let (mut gs0, mut gs1) = (vec![0.0; inst.n_gifts()], vec![0.0; inst.n_gifts()]);
        for (e, &(c, g)) in inst.edges().iter().enumerate() {
            cs0[c] += frac.x[e];
            cs1[c] += x[e];
            gs0[g] += frac.x[e];
            gs1[g] += x[e];
        }
        for (a, b) in cs0.iter().zip(&cs1).chain(gs0.iter().zip(&gs1)) {
            assert!((a - b).abs() < 1e-9);
            assert!(*b <= 1.0 + 1e-9);
        }
        let forest = prune_big_clusters(&inst, &x).unwrap();
        assert!(forest.max_gift_degree(&inst) <= 2);
        for t in &forest.trees {
            assert!(t.lost.len() <= 1, "seed {seed}: {t:?}");
            if t.kind == TreeKind::Deficient {
                assert_eq!(t.gifts.len() + 1, t.children.len());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = alpha / 4;
        if let Ok(a) = round_fractional(&inst, &frac, beta, &cfg, &mut rng, "t") {
            for (e, &(c, g)) in inst.edges().iter().enumerate() {
                if a.owner[g] == Some(c) {
                    assert!(inst.desires(c, g));
                }
                assert!(a.selection.z[e] <= 1.0 / beta as f64 + 1e-12);
            }
        }
    }
}

#[test]
fn selection_marginals_three_to_one() {
    for mode in [SamplingMode::Gather, SamplingMode::RakeCompress] {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 10_000;
        let hits = (0..trials).filter(|_| sample_tree(2, &[(0, 1)], &[3.0, 1.0], mode, &mut rng).0 == 0).count();
        let f = hits as f64 / trials as f64;
        assert!((f - 0.75).abs() <= 0.02, "{mode:?}: {f}");
    }
}
