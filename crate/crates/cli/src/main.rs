//! `santa`: generators, solvers, verifiers and benchmarks over files.
//!
//! The main artifact of a command (instance, assignment, rounded graph)
//! goes to `--out` when given, and the report to stdout; without `--out`
//! the artifact goes to stdout and the report to stderr.
//!
//! Exit codes: 0 success, 1 usage error, 2 infeasible or invalid.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use num::BigRational;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use santa_congest::instances::{
    gen_path, gen_random, gen_scn, gen_sparsification_example, parse_assignment, parse_instance, scn_sets_disjoint,
    verify_assignment,
    write_assignment, write_instance, PathVariant, RandomParams,
};
use santa_congest::lp::format::parse_lp;
use santa_congest::lp::{simulate_kernel, solve_feasibility_with, solve_max_with, SolverConfig, Verdict};
use santa_congest::rounding::{parse_graph, round_cycles, write_graph, RoundingConfig, Weight, WeightedGraph};
use santa_congest::santa::{solve, SantaConfig};
use santa_congest::sim::{NetConfig, SimMode, StatsLog};

/// Version of the report and stats schemas.
const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "santa", version, about = "Distributed Santa Claus lab instrument")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// LP precision (defaults: 0.5 for solve, 0.1 for lp-solve).
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Enforce the per-edge bit budget and quantize transmitted values.
    #[arg(long, global = true)]
    strict_bits: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Emit an instance file.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Run the approximation pipeline on an instance.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta_const: f64,
        /// Measure LP rounds on the simulator instead of charging them.
        #[arg(long)]
        simulate_lp: bool,
    },
    /// Solve a mixed packing-covering LP on the simulated network.
    LpSolve {
        file: PathBuf,
        /// Maximize γ in `Px ≤ p, Cx ≥ γc` instead of deciding feasibility.
        #[arg(long)]
        max_form: bool,
        /// Run the message-level simulator instead of the fast path.
        #[arg(long)]
        faithful: bool,
    },
    /// Round a bipartite weighted graph until its fractional part is a forest.
    CycleRound {
        graph: PathBuf,
        #[arg(long, conflicts_with = "float")]
        rational: bool,
        #[arg(long)]
        float: bool,
    },
    /// Check an assignment and report the minimum child value.
    Verify { instance: PathBuf, assignment: PathBuf },
    /// Solve SC_n for several n with random input bits; report rounds vs n.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 64, 256])]
    sizes: Vec<usize>,
    /// Bit-string pairs per size.
    #[arg(long, default_value_t = 1)]
    pairs: usize,
}

#[derive(Debug, Subcommand)]
enum Family {
    Random {
        #[arg(long)]
        children: usize,
        #[arg(long)]
        gifts: usize,
        #[arg(long, default_value_t = 1)]
        min_value: u64,
        #[arg(long, default_value_t = 10)]
        max_value: u64,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
    },
    Path {
        #[arg(long)]
        variant: PathVariant,
        #[arg(long)]
        n: usize,
    },
    /// SC_n; `a` and `b` are 0/1 strings of length √n (random if omitted).
    Scn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
    },
    /// The sparsification counterexample, with its fractional solution.
    Sparsify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: u64,
    },
}

/// What a command produced: the artifact text, a report, and whether the
/// outcome counts as infeasible or invalid.
struct Output {
    artifact: Option<String>,
    report: Vec<(&'static str, Value)>,
    stats: Option<StatsLog>,
    failed: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn bits(s: &str) -> Result<Vec<bool>, CliError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Usage(format!("bit string {s:?} has a character other than 0/1"))),
        })
        .collect()
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.gen_bool(0.5)).collect()
}

fn side(n: usize) -> usize {
    (n as f64).sqrt().round() as usize
}

fn generate(cli: &Cli, family: &Family) -> Result<Output, CliError> {
    let usage = |e: santa_congest::instances::InstanceError| CliError::Usage(e.to_string());
    let mut report = vec![("family", json!(format!("{family:?}").split_whitespace().next().unwrap_or("")))];
    let text = match family {
        Family::Random { children, gifts, min_value, max_value, density } => {
            let p = RandomParams {
                children: *children,
                gifts: *gifts,
                min_value: *min_value,
                max_value: *max_value,
                density: *density,
            };
            write_instance(&gen_random(&p, cli.seed).map_err(usage)?, &[])
        }
        Family::Path { variant, n } => write_instance(&gen_path(*variant, *n).map_err(usage)?, &[]),
        Family::Scn { n, a, b } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let s = side(*n);
            let a = a.as_deref().map(bits).transpose()?.unwrap_or_else(|| random_bits(&mut rng, s));
            let b = b.as_deref().map(bits).transpose()?.unwrap_or_else(|| random_bits(&mut rng, s));
            let (inst, layout) = gen_scn(*n, &a, &b).map_err(usage)?;
            let disjoint = scn_sets_disjoint(&a, &b);
            report.push(("nodes", json!(layout.predicted_nodes())));
            report.push(("diameter_bound", json!(layout.diameter_bound())));
            report.push(("disjoint", json!(disjoint)));
            write_instance(&inst, &[])
        }
        Family::Sparsify { k, t } => {
            let ex = gen_sparsification_example(*k, *t).map_err(usage)?;
            write_instance(&ex.instance, &ex.fractional)
        }
    };
    Ok(Output { artifact: Some(text), report, stats: None, failed: false })
}

fn cmd_solve(cli: &Cli, instance: &Path, beta_const: f64, simulate_lp: bool) -> Result<Output, CliError> {
    let (inst, _) = parse_instance(&read(instance)?).map_err(invalid)?;
    let mut cfg = SantaConfig { beta_const, simulate_lp, ..SantaConfig::default() };
    if let Some(e) = cli.eps {
        cfg.eps = e;
    }
    cfg.solver.quantize = cli.strict_bits;
    let out = solve(&inst, cli.seed, &cfg).map_err(invalid)?;
    let report = vec![
        ("value", json!(inst.format_value(out.verification.min_units))),
        ("valid", json!(out.verification.valid)),
        ("t", json!(inst.format_value(out.t))),
        ("alpha", json!(out.alpha)),
        ("beta", json!(out.beta)),
        ("retries", json!(out.retries)),
        ("guarantee_met", json!(out.guarantee_met)),
        ("probes", json!(out.ledger.probes.len())),
        ("sharpenings", json!(out.ledger.sharpenings)),
        ("rounds", json!(out.total.rounds_elapsed)),
    ];
    Ok(Output {
        artifact: Some(write_assignment(&out.assignment)),
        report,
        stats: Some(out.stats),
        failed: !out.verification.valid,
    })
}

fn cmd_lp_solve(cli: &Cli, file: &Path, max_form: bool, faithful: bool) -> Result<Output, CliError> {
    let raw = parse_lp(&read(file)?).map_err(invalid)?;
    let eps = cli.eps.unwrap_or(0.1);
    let solver = SolverConfig { quantize: cli.strict_bits, ..SolverConfig::default() };
    let net = NetConfig { strict: cli.strict_bits, seed: cli.seed, ..NetConfig::default() };
    let mode = if faithful { SimMode::Faithful } else { SimMode::FastPath };
    let mut stats = StatsLog::default();
    let mut count = 0;
    let runner = |lp: &santa_congest::lp::MixedLP, e: f64| {
        count += 1;
        let s = simulate_kernel(lp, e, &solver, net, mode, false, &format!("run{count}"))?;
        stats.extend(s.stats);
        Ok(s.run)
    };
    let mut report = vec![("eps", json!(eps))];
    let (x, failed) = if max_form {
        let m = solve_max_with(&raw, eps, runner).map_err(invalid)?;
        report.push(("gamma", json!(m.gamma)));
        report.push(("lambda_lo", json!(m.lambda_lo)));
        report.push(("lambda_hi", json!(m.lambda_hi)));
        report.push(("uncertified", json!(m.uncertified)));
        report.push(("probes", json!(m.probes.len())));
        (Some(m.x), m.gamma == 0.0)
    } else {
        let lp = raw.normalize().map_err(invalid)?;
        let f = solve_feasibility_with(&lp, eps, runner).map_err(invalid)?;
        report.push(("iterations", json!(f.iterations())));
        report.push(("escalated", json!(f.escalated)));
        match f.verdict {
            Verdict::Feasible(x) => {
                report.push(("verdict", json!("feasible")));
                report.push(("ratio", json!(lp.ratio(&x))));
                (Some(x), false)
            }
            Verdict::Infeasible(kind) => {
                report.push(("verdict", json!("infeasible")));
                report.push(("reason", json!(format!("{kind:?}"))));
                (None, true)
            }
        }
    };
    if let Some(x) = &x {
        report.push(("x", json!(x)));
    }
    report.push(("rounds", json!(stats.total().rounds_elapsed)));
    report.push(("budget_violations", json!(stats.total().budget_violations)));
    let artifact = x.map(|x| x.iter().map(|v| format!("{v}\n")).collect());
    Ok(Output { artifact, report, stats: Some(stats), failed })
}

fn cmd_cycle_round(cli: &Cli, graph: &Path, rational: bool) -> Result<Output, CliError> {
    let g = parse_graph(&read(graph)?).map_err(invalid)?;
    let cfg = RoundingConfig { seed: cli.seed, ..RoundingConfig::default() };
    let (text, iterations, cycles, stats) = if rational {
        let r = round_cycles(&g, &cfg, "cycle-round").map_err(invalid)?;
        (write_graph(g.n, &g.edges, &r.w, &g.cap), r.iterations.len(), r.cycles_rounded, r.stats)
    } else {
        let f = |v: &[BigRational]| v.iter().map(Weight::to_f64).collect::<Vec<f64>>();
        let gf = WeightedGraph::new(g.n, g.edges.clone(), f(&g.w), f(&g.cap)).map_err(invalid)?;
        let r = round_cycles(&gf, &cfg, "cycle-round").map_err(invalid)?;
        (write_graph(g.n, &g.edges, &r.w, &gf.cap), r.iterations.len(), r.cycles_rounded, r.stats)
    };
    let report = vec![
        ("mode", json!(if rational { "rational" } else { "float" })),
        ("iterations", json!(iterations)),
        ("cycles_rounded", json!(cycles)),
        ("rounds", json!(stats.total().rounds_elapsed)),
    ];
    Ok(Output { artifact: Some(text), report, stats: Some(stats), failed: false })
}

fn cmd_verify(instance: &Path, assignment: &Path) -> Result<Output, CliError> {
    let (inst, _) = parse_instance(&read(instance)?).map_err(invalid)?;
    let a = parse_assignment(&read(assignment)?).map_err(invalid)?;
    let v = verify_assignment(&inst, &a);
    let report = vec![
        ("valid", json!(v.valid)),
        ("value", json!(inst.format_value(v.min_units))),
        ("problems", json!(v.problems)),
    ];
    Ok(Output { artifact: None, report, stats: None, failed: !v.valid })
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<Output, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut cfg = SantaConfig::default();
    if let Some(e) = cli.eps {
        cfg.eps = e;
    }
    cfg.solver.quantize = cli.strict_bits;
    let mut table = String::from("n,pair,nodes,diameter_bound,disjoint,value,rounds,probes\n");
    let mut rows = Vec::new();
    let mut failed = false;
    for &n in &args.sizes {
        for pair in 0..args.pairs {
            let s = side(n);
            let (a, b) = (random_bits(&mut rng, s), random_bits(&mut rng, s));
            let (inst, layout) = gen_scn(n, &a, &b).map_err(|e| CliError::Usage(e.to_string()))?;
            let disjoint = scn_sets_disjoint(&a, &b);
            let out = solve(&inst, cli.seed.wrapping_add(pair as u64), &cfg).map_err(invalid)?;
            failed |= !out.verification.valid;
            let nodes = inst.n_children() + inst.n_gifts();
            table.push_str(&format!(
                "{n},{pair},{nodes},{},{disjoint},{},{},{}\n",
                layout.diameter_bound(),
                out.verification.min_units,
                out.total.rounds_elapsed,
                out.ledger.probes.len()
            ));
            rows.push(json!({
                "n": n, "pair": pair, "nodes": nodes, "diameter_bound": layout.diameter_bound(),
                "disjoint": disjoint, "value": out.verification.min_units,
                "rounds": out.total.rounds_elapsed, "probes": out.ledger.probes.len(),
            }));
        }
    }
    let artifact = match cli.format {
        Format::Csv => table,
        Format::Json => serde_json::to_string_pretty(&json!({ "schema": SCHEMA, "rows": rows })).unwrap() + "\n",
    };
    Ok(Output { artifact: Some(artifact), report: vec![("sizes", json!(args.sizes))], stats: None, failed })
}

fn render(format: Format, report: &[(&'static str, Value)], stats: Option<&StatsLog>) -> String {
    match format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("schema".into(), json!(SCHEMA));
            for (k, v) in report {
                obj.insert((*k).into(), v.clone());
            }
            if let Some(s) = stats {
                obj.insert("stats".into(), serde_json::to_value(&s.rows).unwrap());
            }
            serde_json::to_string_pretty(&Value::Object(obj)).unwrap() + "\n"
        }
        Format::Csv => {
            let mut s = format!("field,value\nschema,{SCHEMA}\n");
            for (k, v) in report {
                let v = match v {
                    Value::String(t) => t.clone(),
                    other => other.to_string(),
                };
                let quoted = if v.contains(',') { format!("\"{}\"", v.replace('"', "\"\"")) } else { v };
                s.push_str(&format!("{k},{quoted}\n"));
            }
            if let Some(st) = stats {
                s.push('\n');
                s.push_str(&st.to_csv_string());
            }
            s
        }
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    if let Some(e) = cli.eps {
        if !(e > 0.0 && e <= 0.5) {
            return Err(CliError::Usage(format!("--eps must lie in (0, 1/2], got {e}")));
        }
    }
    match &cli.cmd {
        Cmd::Generate { family } => generate(cli, family),
        Cmd::Solve { instance, beta_const, simulate_lp } => cmd_solve(cli, instance, *beta_const, *simulate_lp),
        Cmd::LpSolve { file, max_form, faithful } => cmd_lp_solve(cli, file, *max_form, *faithful),
        Cmd::CycleRound { graph, rational, .. } => cmd_cycle_round(cli, graph, *rational),
        Cmd::Verify { instance, assignment } => cmd_verify(instance, assignment),
        Cmd::Bench(args) => cmd_bench(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    let report = render(cli.format, &out.report, out.stats.as_ref());
    let bench = matches!(cli.cmd, Cmd::Bench(_));
    match (&cli.out, out.artifact) {
        (Some(path), Some(text)) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
            if !bench {
                print!("{report}");
            }
        }
        (None, Some(text)) => {
            print!("{text}");
            if !bench {
                eprint!("{report}");
            }
        }
        (_, None) => print!("{report}"),
    }
    ExitCode::from(if out.failed { 2 } else { 0 })
}
