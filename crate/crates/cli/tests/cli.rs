use std::path::Path;
use std::process::{Command, Output};

use santa_congest::instances::{parse_instance, write_instance};
use santa_congest::rounding::parse_graph;
use tempfile::TempDir;

fn santa(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_santa")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(csv: &'a str, key: &str) -> &'a str {
    csv.lines().find_map(|l| l.strip_prefix(&format!("{key},"))).unwrap_or_else(|| panic!("no {key} in {csv}"))
}

#[test]
fn generated_instances_round_trip_and_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 4] = [
        &["generate", "random", "--children", "5", "--gifts", "7", "--density", "0.4", "--seed", "9"],
        &["generate", "path", "--variant", "I3", "--n", "5"],
        &["generate", "scn", "--n", "16", "--seed", "4"],
        &["generate", "sparsify", "--k", "3", "--t", "6"],
    ];
    for args in cases {
        let a = santa(args, dir.path());
        let b = santa(args, dir.path());
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
        let text = stdout(&a);
        let (inst, frac) = parse_instance(&text).unwrap();
        assert_eq!(write_instance(&inst, &frac), text);
    }
}

#[test]
fn malformed_parameters_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["generate", "scn", "--n", "15"][..],
        &["generate", "scn", "--n", "16", "--a", "10x1"],
        &["generate", "path", "--variant", "I9", "--n", "3"],
        &["solve", "missing.txt"],
        &["--eps", "0.9", "lp-solve", "x.lp"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&santa(args, dir.path())), 1, "{args:?}");
    }
}

#[test]
fn solve_path_and_verify() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&santa(&["generate", "path", "--variant", "I2", "--n", "4", "--out", "i2.txt"], dir.path())), 0);
    let s = santa(&["solve", "i2.txt", "--seed", "5", "--out", "a.txt"], dir.path());
    assert_eq!(code(&s), 0);
    assert_eq!(field(&stdout(&s), "value"), "1");
    let v = santa(&["verify", "i2.txt", "a.txt"], dir.path());
    assert_eq!(code(&v), 0);
    assert_eq!(field(&stdout(&v), "valid"), "true");

    // The same gift twice, and a pair off the desire edges.
    let mut bad = std::fs::read_to_string(dir.path().join("a.txt")).unwrap();
    bad.push_str("0 3\n");
    std::fs::write(dir.path().join("bad.txt"), bad).unwrap();
    let v = santa(&["verify", "i2.txt", "bad.txt", "--format", "json"], dir.path());
    assert_eq!(code(&v), 2);
    let j: serde_json::Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(j["valid"], false);
}

#[test]
fn solve_output_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    santa(&["generate", "random", "--children", "6", "--gifts", "9", "--seed", "2", "--out", "r.txt"], dir.path());
    let a = santa(&["solve", "r.txt", "--seed", "7"], dir.path());
    let b = santa(&["solve", "r.txt", "--seed", "7"], dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!((&a.stdout, &a.stderr), (&b.stdout, &b.stderr));
}

#[test]
fn lp_solve_matching_paths() {
    let dir = TempDir::new().unwrap();
    // One edge between two vertices: x = 1 meets both rows.
    std::fs::write(dir.path().join("p1.lp"), "mpc 2 2 1\nP 0 0 1\nP 1 0 1\nC 0 0 1\nC 1 0 1\np 0 1\np 1 1\nc 0 1\nc 1 1\n").unwrap();
    // Two edges: the middle vertex cannot cover both ends.
    std::fs::write(
        dir.path().join("p2.lp"),
        "mpc 3 3 2\nP 0 0 1\nP 1 0 1\nP 1 1 1\nP 2 1 1\nC 0 0 1\nC 1 0 1\nC 1 1 1\nC 2 1 1\np 0 1\np 1 1\np 2 1\nc 0 1\nc 1 1\nc 2 1\n",
    )
    .unwrap();
    let f = santa(&["lp-solve", "p1.lp", "--eps", "0.5", "--strict-bits", "--out", "x.txt"], dir.path());
    assert_eq!(code(&f), 0, "{}", String::from_utf8_lossy(&f.stderr));
    let out = stdout(&f);
    assert_eq!(field(&out, "verdict"), "feasible");
    assert_eq!(field(&out, "budget_violations"), "0");
    assert!(out.contains("run_id,phase,rounds"));
    let i = santa(&["lp-solve", "p2.lp", "--eps", "0.5"], dir.path());
    assert_eq!(code(&i), 2);
    assert_eq!(field(&stdout(&i), "verdict"), "infeasible");
    let m = santa(&["lp-solve", "p2.lp", "--eps", "0.5", "--max-form", "--format", "json", "--out", "g.txt"], dir.path());
    assert_eq!(code(&m), 0);
    let j: serde_json::Value = serde_json::from_slice(&m.stdout).unwrap();
    assert!(j["gamma"].as_f64().unwrap() > 0.0);
}

#[test]
fn cycle_round_keeps_degrees() {
    let dir = TempDir::new().unwrap();
    let g = "graph 6 7\ne 0 1 1/2\ne 1 2 1/3\ne 2 3 2/3\ne 3 0 1/2\ne 3 4 1/3\ne 4 5 3/4\ne 5 2 1/4\n";
    std::fs::write(dir.path().join("g.txt"), g).unwrap();
    let before = parse_graph(g).unwrap();
    for mode in ["--rational", "--float"] {
        let o = santa(&["cycle-round", "g.txt", mode, "--seed", "3"], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let after = parse_graph(&stdout(&o)).unwrap();
        assert_eq!(after.edges, before.edges);
        for v in 0..6 {
            let sum = |w: &[num::BigRational]| {
                let t: num::BigRational = before.edges.iter().zip(w).filter(|((a, b), _)| *a == v || *b == v).map(|(_, x)| x.clone()).sum();
                num::ToPrimitive::to_f64(&t).unwrap()
            };
            assert!((sum(&before.w) - sum(&after.w)).abs() < 1e-9, "{mode} vertex {v}");
        }
    }
    std::fs::write(dir.path().join("odd.txt"), "graph 3 3\ne 0 1 1/2\ne 1 2 1/2\ne 2 0 1/2\n").unwrap();
    assert_eq!(code(&santa(&["cycle-round", "odd.txt"], dir.path())), 2);
}

#[test]
fn bench_reports_rounds_per_size() {
    let dir = TempDir::new().unwrap();
    let o = santa(&["bench", "--sizes", "4,16,36", "--seed", "2"], dir.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,pair,nodes,diameter_bound,disjoint,value,rounds,probes");
    let rounds: Vec<u64> = lines.map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    assert_eq!(rounds.len(), 3);
    assert!(rounds.windows(2).all(|w| w[0] < w[1]), "{rounds:?}");
}
