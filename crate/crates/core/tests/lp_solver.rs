use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use santa_congest::lp::{solve_feasibility, solve_max, InfeasibleKind, MixedLP, SolverConfig, Verdict};
use santa_congest::oracles::{exact_gamma, lp_feasibility_oracle};

fn random_lp(seed: u64) -> (MixedLP, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_p = rng.gen_range(1..=12);
    let n_c = rng.gen_range(1..=12);
    let m = rng.gen_range(1..=10);
    let mut p = Vec::new();
    let mut c = Vec::new();
    for i in 0..m {
        // Every variable touches at least one packing and one covering row.
        let jp = rng.gen_range(0..n_p);
        let jc = rng.gen_range(0..n_c);
        for j in 0..n_p {
            if j == jp || rng.gen_bool(0.3) {
                p.push((j, i, rng.gen_range(0.1..1.0)));
            }
        }
        for j in 0..n_c {
            if j == jc || rng.gen_bool(0.3) {
                c.push((j, i, rng.gen_range(0.1..1.0)));
            }
        }
    }
    let lp = MixedLP::unit(n_p, n_c, m, &p, &c).unwrap();
    let gamma = exact_gamma(&lp).unwrap().map(|g| g.to_f64().unwrap());
    let lp = match gamma {
        Some(g) if g > 0.0 => lp.scale_packing(rng.gen_range(0.5..2.0) * g),
        _ => lp,
    };
    let lambda = exact_gamma(&lp).unwrap().map_or(0.0, |g| 1.0 / g.to_f64().unwrap());
    (lp, lambda)
}

#[test]
fn feasibility_agrees_with_exact_oracle() {
    let cfg = SolverConfig::default();
    let (mut feasible, mut certified) = (0, 0);
    for seed in 0..40 {
        let (lp, lambda) = random_lp(seed);
        for eps in [0.5, 0.1] {
            let out = solve_feasibility(&lp, eps, &cfg).unwrap();
            assert!(out.runs.iter().all(|r| r.iterations <= r.params.r));
            match &out.verdict {
                Verdict::Feasible(x) => {
                    feasible += 1;
                    assert!(lp.is_eps_feasible(x, eps), "seed {seed}");
                }
                Verdict::Infeasible(InfeasibleKind::Certificate) => {
                    certified += 1;
                    assert!(!lp_feasibility_oracle(&lp, 1.0).unwrap(), "seed {seed} lambda {lambda}");
                }
                Verdict::Infeasible(InfeasibleKind::EmptyCoveringRow(j)) => {
                    assert!(lp.c_rows()[*j].is_empty());
                    assert!(!lp_feasibility_oracle(&lp, 1.0).unwrap());
                }
                v => panic!("seed {seed}: {v:?}"),
            }
            if lambda > 1.0 + eps {
                assert!(!out.verdict.is_feasible(), "seed {seed}");
            }
        }
    }
    assert!(feasible > 10 && certified > 10, "{feasible} {certified}");
}

#[test]
fn max_form_within_band() {
    let cfg = SolverConfig::default();
    for seed in 100..130 {
        let (lp, lambda) = random_lp(seed);
        let eps = 0.1;
        let s = solve_max(&lp, eps, &cfg).unwrap();
        let gamma_star = 1.0 / lambda;
        assert!(s.gamma <= gamma_star * (1.0 + 1e-9), "seed {seed}: {} > {gamma_star}", s.gamma);
        assert!(s.gamma >= gamma_star / (1.0 + eps), "seed {seed}: {} vs {gamma_star}", s.gamma);
        let (px, cx) = lp.evaluate(&s.x);
        assert!(px.iter().all(|&v| v <= 1.0 + 1e-12));
        assert!(cx.iter().all(|&v| v >= s.gamma * (1.0 - 1e-12)));
        assert!(!s.uncertified);
    }
}
