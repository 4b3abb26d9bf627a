//! Sequential execution of the multiplicative-weights feasibility iteration.
//!
//! The per-node computations are exposed as small functions so that the
//! simulated protocol in [`super::simulated`] performs literally the same
//! floating-point operations in the same order.
//!
//! Exponentials are evaluated relative to the current extreme row level
//! (`exp(P_j x - max P x)`, `exp(min C x - C_j x)`); the gradients only use
//! ratios of these weights, so the shift changes nothing but the range.

use serde::{Deserialize, Serialize};

use super::{LpError, MixedLP, Quantizer};
use crate::fsum::ExactSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Constant in the iteration cap `R`.
    pub c_r: f64,
    /// Constant `c` in the quantization step `ε / (200 c R)`.
    pub quant_c: f64,
    /// Round every transmitted value to a power of `1 + δ`.
    pub quantize: bool,
    /// Optional override of `R`.
    pub max_iterations: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { c_r: 1000.0, quant_c: 4.0, quantize: false, max_iterations: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub eps: f64,
    /// Number of constraints used in the logarithms (at least 2).
    pub n: usize,
    pub k: f64,
    pub r: u64,
    pub delta: f64,
    #[serde(skip)]
    quantizer: Option<Quantizer>,
}

/// Smallest admissible epsilon for an LP with `n` constraints.
pub fn eps_floor(n: usize) -> f64 {
    (1e-3f64).min((n.max(2) as f64).powi(-3))
}

impl Params {
    pub fn new(lp: &MixedLP, eps: f64, cfg: &SolverConfig) -> Result<Self, LpError> {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(LpError::EpsOutOfRange(eps));
        }
        let n = (lp.n_p() + lp.n_c()).max(2);
        let floor = eps_floor(n);
        if eps < floor {
            return Err(LpError::EpsTooSmall { eps, floor });
        }
        let ln_n = (n as f64).ln();
        let k = 10.0 * ln_n / eps;
        let r_real = cfg.c_r * ln_n * ln_n * (lp.m().max(1) as f64 / eps).ln() / eps.powi(3);
        let r = cfg.max_iterations.unwrap_or(r_real.ceil() as u64);
        let delta = eps / (200.0 * cfg.quant_c * r.max(1) as f64);
        let quantizer = if cfg.quantize { Some(Quantizer::new(delta)?) } else { None };
        Ok(Params { eps, n, k, r, delta, quantizer })
    }

    pub fn quantizing(&self) -> bool {
        self.quantizer.is_some()
    }

    /// Value as transmitted: quantized in strict mode, unchanged otherwise.
    pub fn q(&self, v: f64) -> f64 {
        match (&self.quantizer, v == 0.0) {
            (Some(qz), false) => qz.quantize(v).expect("transmitted values are positive and finite").value,
            _ => v,
        }
    }

    /// Wire size of a transmitted scalar.
    pub fn bits(&self, v: f64) -> u64 {
        match (&self.quantizer, v == 0.0) {
            (Some(qz), false) => qz.quantize(v).expect("positive").bit_len(),
            (Some(_), true) => 2,
            (None, _) => 64,
        }
    }

    pub fn infeasibility_ratio(&self) -> f64 {
        1.0 - self.eps / 50.0
    }
}

/// Starting value of variable `i`.
pub fn initial_x(lp: &MixedLP, i: usize, p: &Params) -> f64 {
    let col = if lp.p_col(i).is_empty() { lp.c_col(i) } else { lp.p_col(i) };
    let norm = col.iter().map(|e| e.1).fold(0.0, f64::max);
    p.q(1.0 / (lp.m() as f64 * norm))
}

/// `Σ coef · x` in the given order.
pub fn dot<I: Iterator<Item = (f64, f64)>>(pairs: I) -> f64 {
    let mut s = 0.0;
    for (a, b) in pairs {
        s += a * b;
    }
    s
}

pub fn packing_weight(p: &Params, level: f64, max_level: f64) -> f64 {
    p.q((level - max_level).exp())
}

pub fn covering_weight(p: &Params, level: f64, min_live: f64) -> f64 {
    p.q((min_live - level).exp())
}

pub fn contribution(p: &Params, coef: f64, weight: f64) -> f64 {
    p.q(coef * weight)
}

/// Global weight sum as broadcast by the leader.
pub fn global_sum(p: &Params, s: &ExactSum) -> f64 {
    p.q(s.value())
}

/// Variable update: returns the new value and whether the variable votes
/// for infeasibility.
pub fn variable_step(p: &Params, x: f64, a_parts: &[f64], ysum: f64, b_parts: &[f64], zsum: f64) -> (f64, bool) {
    let a = if ysum > 0.0 { a_parts.iter().sum::<f64>() / ysum } else { 0.0 };
    let b = if zsum > 0.0 { b_parts.iter().sum::<f64>() / zsum } else { 0.0 };
    if b <= 0.0 || a > p.infeasibility_ratio() * b {
        return (x, true);
    }
    let delta = 0.5 * (1.0 - a / b);
    debug_assert!(delta >= p.eps / 100.0 * (1.0 - 1e-9) && delta <= 0.5);
    (p.q(x * (1.0 + delta / p.k)), false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibleKind {
    /// Every variable voted: the LP with packing bounds scaled by
    /// `1 - ε/50` has no solution.
    Certificate,
    /// The iteration cap `R` was reached.
    IterationCap,
    /// A covering row has no nonzero coefficient.
    EmptyCoveringRow(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Feasible(Vec<f64>),
    Infeasible(InfeasibleKind),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    PackingReachedK,
    AllCoveringReachedK,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRun {
    pub verdict: Verdict,
    pub iterations: u64,
    pub params: Params,
    pub stop: Option<StopReason>,
    /// Largest live row level observed before an update (stays below K).
    pub max_live_level: f64,
    /// x never decreased, and grew in some coordinate at every update.
    pub monotone: bool,
}

/// Row levels at the start of an iteration, reduced to what the leader
/// needs. Each row decides locally whether it reached `K`; the extreme
/// levels travel as transmitted (quantized) values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSummary {
    pub stop_packing: bool,
    pub retired: usize,
    pub max_packing: f64,
    pub min_live_covering: f64,
}

impl LevelSummary {
    pub fn from_levels(p: &Params, packing: &[f64], covering: &[f64]) -> Self {
        LevelSummary {
            stop_packing: packing.iter().any(|&l| l >= p.k),
            retired: covering.iter().filter(|&&l| l >= p.k).count(),
            max_packing: packing.iter().map(|&l| p.q(l)).fold(f64::NEG_INFINITY, f64::max),
            min_live_covering: covering.iter().filter(|&&l| l < p.k).map(|&l| p.q(l)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn stop(&self, n_c: usize) -> Option<StopReason> {
        if self.stop_packing {
            Some(StopReason::PackingReachedK)
        } else if self.retired == n_c {
            Some(StopReason::AllCoveringReachedK)
        } else {
            None
        }
    }
}

pub fn empty_covering_row(lp: &MixedLP) -> Option<usize> {
    lp.c_rows().iter().position(Vec::is_empty)
}

/// Runs the iteration on one machine.
pub fn run_kernel(lp: &MixedLP, eps: f64, cfg: &SolverConfig) -> Result<KernelRun, LpError> {
    let p = Params::new(lp, eps, cfg)?;
    let finish = |verdict, iterations, stop, max_live_level, monotone| KernelRun {
        verdict,
        iterations,
        params: p,
        stop,
        max_live_level,
        monotone,
    };
    if let Some(j) = empty_covering_row(lp) {
        return Ok(finish(Verdict::Infeasible(InfeasibleKind::EmptyCoveringRow(j)), 0, None, 0.0, true));
    }
    let m = lp.m();
    let mut x: Vec<f64> = (0..m).map(|i| initial_x(lp, i, &p)).collect();
    let mut pl = vec![0.0; lp.n_p()];
    let mut cl = vec![0.0; lp.n_c()];
    let mut pw = vec![0.0; lp.n_p()];
    let mut cw = vec![0.0; lp.n_c()];
    let mut a_parts = Vec::new();
    let mut b_parts = Vec::new();
    let mut t = 0u64;
    let mut max_live = 0.0f64;
    let mut monotone = true;
    loop {
        for (j, row) in lp.p_rows().iter().enumerate() {
            pl[j] = dot(row.iter().map(|&(i, v)| (v, x[i])));
        }
        for (j, row) in lp.c_rows().iter().enumerate() {
            cl[j] = dot(row.iter().map(|&(i, v)| (v, x[i])));
        }
        let summary = LevelSummary::from_levels(&p, &pl, &cl);
        if let Some(stop) = summary.stop(lp.n_c()) {
            let out = x.iter().map(|v| v / p.k).collect();
            return Ok(finish(Verdict::Feasible(out), t, Some(stop), max_live, monotone));
        }
        if t >= p.r {
            return Ok(finish(Verdict::Infeasible(InfeasibleKind::IterationCap), t, None, max_live, monotone));
        }
        max_live = pl.iter().copied().fold(max_live, f64::max);
        let mut ysum = ExactSum::new();
        for j in 0..lp.n_p() {
            pw[j] = packing_weight(&p, pl[j], summary.max_packing);
            ysum.add(pw[j]);
        }
        let mut zsum = ExactSum::new();
        for j in 0..lp.n_c() {
            if cl[j] < p.k {
                max_live = max_live.max(cl[j]);
                cw[j] = covering_weight(&p, cl[j], summary.min_live_covering);
                zsum.add(cw[j]);
            }
        }
        let (ys, zs) = (global_sum(&p, &ysum), global_sum(&p, &zsum));
        let mut all_voted = true;
        let mut next = x.clone();
        for i in 0..m {
            a_parts.clear();
            a_parts.extend(lp.p_col(i).iter().map(|&(j, v)| contribution(&p, v, pw[j])));
            b_parts.clear();
            b_parts.extend(
                lp.c_col(i).iter().filter(|&&(j, _)| cl[j] < p.k).map(|&(j, v)| contribution(&p, v, cw[j])),
            );
            let (nx, voted) = variable_step(&p, x[i], &a_parts, ys, &b_parts, zs);
            all_voted &= voted;
            next[i] = nx;
        }
        if all_voted {
            return Ok(finish(Verdict::Infeasible(InfeasibleKind::Certificate), t, None, max_live, monotone));
        }
        let grew = next.iter().zip(&x).any(|(a, b)| a > b);
        monotone &= grew && next.iter().zip(&x).all(|(a, b)| a >= b);
        x = next;
        t += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_rows_vote_infeasible_at_start() {
        let lp = MixedLP::unit(1, 1, 1, &[(0, 0, 1.0)], &[(0, 0, 1.0)]).unwrap();
        let run = run_kernel(&lp, 0.1, &SolverConfig::default()).unwrap();
        assert_eq!(run.verdict, Verdict::Infeasible(InfeasibleKind::Certificate));
        assert_eq!(run.iterations, 0);
    }

    #[test]
    fn slack_instance_is_feasible() {
        // x ≤ 1 and 2x ≥ 1: plenty of room.
        let lp = MixedLP::unit(1, 1, 1, &[(0, 0, 1.0)], &[(0, 0, 2.0)]).unwrap();
        let run = run_kernel(&lp, 0.1, &SolverConfig::default()).unwrap();
        let Verdict::Feasible(x) = &run.verdict else { panic!("{run:?}") };
        assert!(lp.is_eps_feasible(x, 0.1));
        assert!(run.monotone);
        assert!(run.max_live_level < run.params.k);
    }

    #[test]
    fn rejects_bad_eps() {
        let lp = MixedLP::unit(1, 1, 1, &[(0, 0, 1.0)], &[(0, 0, 1.0)]).unwrap();
        assert!(matches!(run_kernel(&lp, 0.0, &SolverConfig::default()), Err(LpError::EpsOutOfRange(_))));
        assert!(matches!(run_kernel(&lp, 0.6, &SolverConfig::default()), Err(LpError::EpsOutOfRange(_))));
        assert!(matches!(run_kernel(&lp, 1e-9, &SolverConfig::default()), Err(LpError::EpsTooSmall { .. })));
    }
}
