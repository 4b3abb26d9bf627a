//! Threshold LP for a fixed target `T` and the binary search over `T`.
//!
//! Variables live on desire edges to gifts of positive value. For level
//! `t` and factor `α`, a gift is big when `α·v ≥ t`; big gifts count as
//! value `t` in the covering row of each child.

use serde::{Deserialize, Serialize};

use super::SantaError;
use crate::instances::Instance;
use crate::lp::{solve_feasibility_with, InfeasibleKind, KernelRun, MixedLP, SolverConfig, Verdict};

/// `true` for big gifts: `α · v_g ≥ t`. With `t = 0` every gift is big.
pub fn classify_gifts(inst: &Instance, t: f64, alpha: f64) -> Vec<bool> {
    inst.units().iter().map(|&v| alpha * v as f64 >= t).collect()
}

/// The threshold LP together with its variable layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SantaLp {
    /// Rows with their natural bounds; covering rows have bound `t`.
    pub lp: MixedLP,
    /// Instance edge index of each variable.
    pub vars: Vec<usize>,
    pub big: Vec<bool>,
    pub t: f64,
}

/// Row order: covering rows by child; packing rows as desire-pair rows
/// (small edges, in edge order), then big-gift rows, child rows and
/// small-gift rows, each restricted to nonempty rows.
pub fn build_santa_lp(inst: &Instance, t: f64, alpha: f64) -> Result<SantaLp, SantaError> {
    if !(t > 0.0) {
        return Err(SantaError::ZeroThreshold);
    }
    let big = classify_gifts(inst, t, alpha);
    let units = inst.units();
    let vars: Vec<usize> = (0..inst.edges().len()).filter(|&e| units[inst.edges()[e].1] > 0).collect();
    let nc = inst.n_children();
    let mut cov = Vec::new();
    let mut pack = Vec::new();
    let mut row = 0;
    let mut big_of_child: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (i, &e) in vars.iter().enumerate() {
        let (c, g) = inst.edges()[e];
        if big[g] {
            cov.push((c, i, t));
            big_of_child[c].push(i);
        } else {
            cov.push((c, i, units[g] as f64));
        }
    }
    for (i, &e) in vars.iter().enumerate() {
        let (c, g) = inst.edges()[e];
        if !big[g] {
            pack.push((row, i, 1.0));
            pack.extend(big_of_child[c].iter().map(|&b| (row, b, 1.0)));
            row += 1;
        }
    }
    let mut per_gift: Vec<Vec<usize>> = vec![Vec::new(); inst.n_gifts()];
    for (i, &e) in vars.iter().enumerate() {
        per_gift[inst.edges()[e].1].push(i);
    }
    for want_big in [true, false] {
        if !want_big {
            for list in &big_of_child {
                if !list.is_empty() {
                    pack.extend(list.iter().map(|&b| (row, b, 1.0)));
                    row += 1;
                }
            }
        }
        for (g, list) in per_gift.iter().enumerate() {
            if big[g] == want_big && !list.is_empty() {
                pack.extend(list.iter().map(|&i| (row, i, 1.0)));
                row += 1;
            }
        }
    }
    let lp = MixedLP::from_triples(row, nc, vars.len(), &pack, &cov, vec![1.0; row], vec![t; nc])?;
    Ok(SantaLp { lp, vars, big, t })
}

/// Fractional solution on instance edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalSolution {
    /// Target of the search, in value units.
    pub t: u64,
    /// LP level `t/2` at which the solution was computed.
    pub level: f64,
    pub alpha: u64,
    pub big: Vec<bool>,
    /// Big-gift part per instance edge (zero on small edges).
    pub x: Vec<f64>,
    /// Small-gift part per instance edge (zero on big edges).
    pub y: Vec<f64>,
    /// Smallest covering level `C_c u / level` after scaling so that every
    /// packing row is at most one.
    pub gamma: f64,
    /// Precision of the probe that produced it.
    pub eps: f64,
}

impl FractionalSolution {
    /// Small-gift value `V_S(c)` per child.
    pub fn small_value(&self, inst: &Instance) -> Vec<f64> {
        let mut out = vec![0.0; inst.n_children()];
        for (e, &(c, g)) in inst.edges().iter().enumerate() {
            out[c] += self.y[e] * inst.units()[g] as f64;
        }
        out
    }

    /// Children with a nonzero small-gift vector that touch at most `α/2`
    /// small gifts (the half factor of the probed LP).
    pub fn thin_supports(&self, inst: &Instance) -> Vec<usize> {
        let mut count = vec![0usize; inst.n_children()];
        for (e, &(c, _)) in inst.edges().iter().enumerate() {
            if self.y[e] > 0.0 {
                count[c] += 1;
            }
        }
        (0..inst.n_children()).filter(|&c| count[c] > 0 && 2 * count[c] as u64 <= self.alpha).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub t: u64,
    pub eps: f64,
    pub feasible: bool,
    pub kind: Option<InfeasibleKind>,
    pub iterations: u64,
}

/// Outcome of one probe of `LP_{α/2}(t/2)`.
pub fn probe<R>(inst: &Instance, t: u64, alpha: u64, eps: f64, runner: &mut R) -> Result<(ProbeRecord, Option<FractionalSolution>), SantaError>
where
    R: FnMut(&MixedLP, f64) -> Result<KernelRun, crate::lp::LpError>,
{
    let level = t as f64 / 2.0;
    let slp = build_santa_lp(inst, level, alpha as f64 / 2.0)?;
    let norm = slp.lp.normalize()?;
    let f = solve_feasibility_with(&norm, eps, &mut *runner)?;
    let mut rec = ProbeRecord { t, eps, feasible: false, kind: None, iterations: f.iterations() };
    let x = match f.verdict {
        Verdict::Feasible(x) => x,
        Verdict::Infeasible(kind) => {
            rec.kind = Some(kind);
            return Ok((rec, None));
        }
    };
    rec.feasible = true;
    let (px, cx) = norm.evaluate(&x);
    let top = px.iter().copied().fold(0.0, f64::max);
    let gamma = cx.iter().copied().fold(f64::INFINITY, f64::min) / top;
    let m = inst.edges().len();
    let (mut xe, mut ye) = (vec![0.0; m], vec![0.0; m]);
    for (i, &e) in slp.vars.iter().enumerate() {
        let v = (x[i] / top).clamp(0.0, 1.0);
        if slp.big[inst.edges()[e].1] {
            xe[e] = v;
        } else {
            ye[e] = v;
        }
    }
    let sol = FractionalSolution { t, level, alpha, big: slp.big, x: xe, y: ye, gamma, eps };
    Ok((rec, Some(sol)))
}

/// Integer binary search on `[lo, hi]` keeping "probe at `a` returned a
/// solution" and "`OPT ≤ d`". Only an infeasible verdict lowers `d`; such
/// a verdict means the LP has no solution, while any `T ≤ OPT` admits one.
/// Returns the final `a` and its solution (`None` for `a = lo = 0`).
pub fn search_range<R>(
    inst: &Instance,
    alpha: u64,
    eps: f64,
    hi: u64,
    runner: &mut R,
    log: &mut Vec<ProbeRecord>,
) -> Result<(u64, Option<FractionalSolution>), SantaError>
where
    R: FnMut(&MixedLP, f64) -> Result<KernelRun, crate::lp::LpError>,
{
    let (mut a, mut d) = (0u64, hi);
    let mut best = None;
    while a < d {
        let t = a + (d - a).div_ceil(2);
        let (rec, sol) = probe(inst, t, alpha, eps, runner)?;
        log.push(rec);
        match sol {
            Some(s) => {
                a = t;
                best = Some(s);
            }
            None => d = t - 1,
        }
    }
    Ok((a, best))
}

/// Binary search over `[0, V]` with probes at precision `eps`.
pub fn binary_search_t(
    inst: &Instance,
    alpha: u64,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<(u64, Option<FractionalSolution>, Vec<ProbeRecord>), SantaError> {
    let mut log = Vec::new();
    let mut runner = |lp: &MixedLP, e: f64| crate::lp::run_kernel(lp, e, cfg);
    let (t, sol) = search_range(inst, alpha, eps, inst.total_units(), &mut runner, &mut log)?;
    Ok((t, sol, log))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_boundary_is_big() {
        let inst = Instance::new(1, vec![200, 199], vec![(0, 0), (0, 1)]).unwrap();
        assert_eq!(classify_gifts(&inst, 1000.0, 5.0), vec![true, false]);
        assert_eq!(classify_gifts(&inst, 0.0, 5.0), vec![true, true]);
    }

    #[test]
    fn one_child_one_big_gift() {
        let inst = Instance::new(1, vec![3], vec![(0, 0)]).unwrap();
        let s = build_santa_lp(&inst, 3.0, 4.0).unwrap();
        assert_eq!((s.lp.n_c(), s.lp.n_p()), (1, 2));
        assert!(s.lp.normalize().unwrap().is_eps_feasible(&[1.0], 0.0));
    }

    #[test]
    fn shared_big_gift_is_infeasible() {
        let inst = Instance::new(2, vec![1], vec![(0, 0), (1, 0)]).unwrap();
        let s = build_santa_lp(&inst, 1.0, 4.0).unwrap();
        let f = crate::lp::solve_feasibility(&s.lp.normalize().unwrap(), 0.1, &SolverConfig::default()).unwrap();
        assert!(!f.verdict.is_feasible());
    }

    #[test]
    fn single_gift_search() {
        let inst = Instance::new(1, vec![7], vec![(0, 0)]).unwrap();
        let (t, sol, _) = binary_search_t(&inst, 8, 0.5, &SolverConfig::default()).unwrap();
        assert!(t >= 7);
        assert!(sol.unwrap().gamma >= 1.0 / 1.5);
        let lonely = Instance::new(2, vec![7], vec![(0, 0)]).unwrap();
        assert_eq!(binary_search_t(&lonely, 8, 0.5, &SolverConfig::default()).unwrap().0, 0);
    }
}
