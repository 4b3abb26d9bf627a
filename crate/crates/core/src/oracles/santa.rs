//! Exact optimum of small Santa Claus instances.
//!
//! Branch and bound over the contested gifts (positive value, at least two
//! desiring children) in descending value. Uncontested gifts go to their
//! only child up front; handing out a gift never lowers anyone's total, so
//! leaving a desired gift unassigned is never better. Two prunes:
//! the optimistic bound `min_c (sum_c + remaining_c)`, and a matching test
//! that every child still at or below the incumbent can get one more
//! distinct gift. Visited `(depth, totals)` states are memoized.

use std::collections::HashSet;

use super::OracleError;
use crate::instances::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceConfig {
    pub gift_cap: usize,
    pub child_cap: usize,
    pub memo_limit: usize,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig { gift_cap: 16, child_cap: 12, memo_limit: 1 << 22 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opt {
    /// Optimum in the instance's integer units.
    pub units: u64,
    pub owner: Vec<Option<usize>>,
}

struct Search<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    /// Position of each gift in `order`, `usize::MAX` if uncontested.
    pos: Vec<usize>,
    sums: Vec<u64>,
    rem: Vec<u64>,
    owner: Vec<Option<usize>>,
    best: u64,
    best_owner: Vec<Option<usize>>,
    memo: HashSet<(usize, Vec<u64>)>,
    memo_limit: usize,
}

impl Search<'_> {
    fn needy_matchable(&self, depth: usize) -> bool {
        let needy: Vec<usize> = (0..self.sums.len()).filter(|&c| self.sums[c] <= self.best).collect();
        let mut matched: Vec<Option<usize>> = vec![None; self.inst.n_gifts()];
        for &c in &needy {
            let mut seen = vec![false; self.inst.n_gifts()];
            if !self.augment(c, depth, &mut seen, &mut matched) {
                return false;
            }
        }
        true
    }

    fn augment(&self, c: usize, depth: usize, seen: &mut [bool], matched: &mut [Option<usize>]) -> bool {
        for &g in self.inst.child_gifts(c) {
            if self.pos[g] == usize::MAX || self.pos[g] < depth || seen[g] {
                continue;
            }
            seen[g] = true;
            if matched[g].is_none_or(|d| self.augment(d, depth, seen, matched)) {
                matched[g] = Some(c);
                return true;
            }
        }
        false
    }

    fn dfs(&mut self, depth: usize) {
        let ub = (0..self.sums.len()).map(|c| self.sums[c] + self.rem[c]).min().unwrap_or(0);
        if ub <= self.best {
            return;
        }
        if depth == self.order.len() {
            self.best = self.sums.iter().copied().min().unwrap_or(0);
            self.best_owner = self.owner.clone();
            return;
        }
        if !self.needy_matchable(depth) {
            return;
        }
        if self.memo.len() < self.memo_limit && !self.memo.insert((depth, self.sums.clone())) {
            return;
        }
        let g = self.order[depth];
        let v = self.inst.units()[g];
        let mut kids = self.inst.gift_children(g).to_vec();
        kids.sort_by_key(|&c| (self.sums[c], c));
        for &c in &kids {
            self.rem[c] -= v;
        }
        for &c in &kids {
            self.sums[c] += v;
            self.owner[g] = Some(c);
            self.dfs(depth + 1);
            self.sums[c] -= v;
        }
        self.owner[g] = None;
        for &c in &kids {
            self.rem[c] += v;
        }
    }
}

pub fn brute_force_opt(inst: &Instance, cfg: &BruteForceConfig) -> Result<Opt, OracleError> {
    let units = inst.units();
    let mut owner: Vec<Option<usize>> = vec![None; inst.n_gifts()];
    let mut sums = vec![0u64; inst.n_children()];
    let mut order = Vec::new();
    for g in 0..inst.n_gifts() {
        match inst.gift_children(g) {
            [] => {}
            [c] => {
                owner[g] = Some(*c);
                sums[*c] += units[g];
            }
            [c, ..] if units[g] == 0 => owner[g] = Some(*c),
            _ => order.push(g),
        }
    }
    if order.len() > cfg.gift_cap && inst.n_children() > cfg.child_cap {
        return Err(OracleError::SantaTooLarge {
            contested: order.len(),
            children: inst.n_children(),
            gift_cap: cfg.gift_cap,
            child_cap: cfg.child_cap,
        });
    }
    if inst.n_children() == 0 {
        return Ok(Opt { units: 0, owner });
    }
    order.sort_by_key(|&g| (std::cmp::Reverse(units[g]), g));
    let mut pos = vec![usize::MAX; inst.n_gifts()];
    let mut rem = vec![0u64; inst.n_children()];
    for (k, &g) in order.iter().enumerate() {
        pos[g] = k;
        for &c in inst.gift_children(g) {
            rem[c] += units[g];
        }
    }
    // Greedy incumbent: each contested gift to its currently poorest child.
    let mut greedy = owner.clone();
    let mut gs = sums.clone();
    for &g in &order {
        let c = *inst.gift_children(g).iter().min_by_key(|&&c| (gs[c], c)).unwrap();
        gs[c] += units[g];
        greedy[g] = Some(c);
    }
    let best = gs.iter().copied().min().unwrap();
    let mut s = Search {
        inst,
        order,
        pos,
        sums,
        rem,
        owner: owner.clone(),
        best,
        best_owner: greedy,
        memo: HashSet::new(),
        memo_limit: cfg.memo_limit,
    };
    s.dfs(0);
    Ok(Opt { units: s.best, owner: s.best_owner })
}

/// Largest gift count accepted by [`naive_opt`].
pub const NAIVE_CAP: usize = 8;

/// Enumerates every gift → child-or-nobody map.
pub fn naive_opt(inst: &Instance) -> Result<u64, OracleError> {
    if inst.n_gifts() > NAIVE_CAP {
        return Err(OracleError::NaiveTooLarge { gifts: inst.n_gifts(), cap: NAIVE_CAP });
    }
    let choices: Vec<usize> = (0..inst.n_gifts()).map(|g| inst.gift_children(g).len() + 1).collect();
    let mut digit = vec![0usize; inst.n_gifts()];
    let mut best = 0u64;
    loop {
        let mut sums = vec![0u64; inst.n_children()];
        for (g, &d) in digit.iter().enumerate() {
            if d > 0 {
                sums[inst.gift_children(g)[d - 1]] += inst.units()[g];
            }
        }
        best = best.max(sums.iter().copied().min().unwrap_or(0));
        let mut k = 0;
        while k < digit.len() {
            digit[k] += 1;
            if digit[k] < choices[k] {
                break;
            }
            digit[k] = 0;
            k += 1;
        }
        if k == digit.len() {
            return Ok(best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_cases() {
        let cfg = BruteForceConfig::default();
        let one = Instance::new(1, vec![5], vec![(0, 0)]).unwrap();
        assert_eq!(brute_force_opt(&one, &cfg).unwrap().units, 5);
        let shared = Instance::new(2, vec![1], vec![(0, 0), (1, 0)]).unwrap();
        assert_eq!(brute_force_opt(&shared, &cfg).unwrap().units, 0);
        assert_eq!(naive_opt(&shared).unwrap(), 0);
    }

    #[test]
    fn witness_realizes_value() {
        let inst = Instance::new(3, vec![4, 3, 3, 2, 2], vec![(0, 0), (1, 0), (1, 1), (2, 1), (0, 2), (2, 2), (1, 3), (2, 4), (0, 4)])
            .unwrap();
        let opt = brute_force_opt(&inst, &BruteForceConfig::default()).unwrap();
        let v = crate::instances::verify_assignment(&inst, &crate::instances::Assignment::from_owners(&opt.owner));
        assert!(v.valid);
        assert_eq!(v.min_units, opt.units);
        assert_eq!(opt.units, naive_opt(&inst).unwrap());
    }
}
