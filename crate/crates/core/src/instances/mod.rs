//! Santa Claus instances, assignments, and the instance generators.
//!
//! Gift values are nonnegative rationals stored as integer `units` over a
//! common `scale` (the lcm of the reduced denominators), so every sum is an
//! exact integer.

pub mod format;
pub mod generators;

use num::integer::lcm;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{parse_assignment, parse_instance, write_assignment, write_instance};
pub use generators::{
    gen_path, gen_random, gen_scn, gen_sparsification_example, path_assignment, scn_sets_disjoint, PathVariant, RandomParams,
    ScnLayout,
    SparsificationExample,
};

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("gift {0} declared twice")]
    DuplicateGift(usize),
    #[error("gift {0} has no value line")]
    MissingGift(usize),
    #[error("edge ({child}, {gift}) refers to a missing node")]
    EdgeOutOfRange { child: usize, gift: usize },
    #[error("edge ({child}, {gift}) appears twice")]
    DuplicateEdge { child: usize, gift: usize },
    #[error("gift value {0} is negative")]
    NegativeValue(String),
    #[error("gift values overflow 64-bit integer units")]
    Overflow,
    #[error("invalid generator parameter: {0}")]
    BadParam(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    n_children: usize,
    units: Vec<u64>,
    scale: u64,
    edges: Vec<(usize, usize)>,
    child_gifts: Vec<Vec<usize>>,
    gift_children: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance from integer values (scale 1).
    pub fn new(n_children: usize, values: Vec<u64>, edges: Vec<(usize, usize)>) -> Result<Self, InstanceError> {
        Self::from_units(n_children, values, 1, edges)
    }

    pub fn from_rationals(n_children: usize, values: &[BigRational], edges: Vec<(usize, usize)>) -> Result<Self, InstanceError> {
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(InstanceError::NegativeValue(v.to_string()));
        }
        let mut scale = BigInt::one();
        for v in values {
            scale = lcm(scale, v.denom().clone());
        }
        let scale_q = BigRational::from_integer(scale.clone());
        let units = values
            .iter()
            .map(|v| (v * &scale_q).to_integer().to_u64().ok_or(InstanceError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        let scale = scale.to_u64().ok_or(InstanceError::Overflow)?;
        Self::from_units(n_children, units, scale, edges)
    }

    /// Values are `units[g] / scale`; the scale is reduced to canonical form.
    pub fn from_units(n_children: usize, units: Vec<u64>, scale: u64, mut edges: Vec<(usize, usize)>) -> Result<Self, InstanceError> {
        if scale == 0 {
            return Err(InstanceError::BadParam("scale must be positive".into()));
        }
        let g = units.iter().fold(scale, |acc, &u| num::integer::gcd(acc, u));
        let units: Vec<u64> = units.iter().map(|u| u / g).collect();
        let scale = scale / g;
        units.iter().try_fold(0u64, |acc, &u| acc.checked_add(u)).ok_or(InstanceError::Overflow)?;
        let n_gifts = units.len();
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(InstanceError::DuplicateEdge { child: w[0].0, gift: w[0].1 });
        }
        let mut child_gifts = vec![Vec::new(); n_children];
        let mut gift_children = vec![Vec::new(); n_gifts];
        for &(c, gft) in &edges {
            if c >= n_children || gft >= n_gifts {
                return Err(InstanceError::EdgeOutOfRange { child: c, gift: gft });
            }
            child_gifts[c].push(gft);
            gift_children[gft].push(c);
        }
        Ok(Instance { n_children, units, scale, edges, child_gifts, gift_children })
    }

    pub fn n_children(&self) -> usize {
        self.n_children
    }

    pub fn n_gifts(&self) -> usize {
        self.units.len()
    }

    /// Gift values in integer units.
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// `(child, gift)` desire edges, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn child_gifts(&self, c: usize) -> &[usize] {
        &self.child_gifts[c]
    }

    pub fn gift_children(&self, g: usize) -> &[usize] {
        &self.gift_children[g]
    }

    pub fn desires(&self, c: usize, g: usize) -> bool {
        self.child_gifts[c].binary_search(&g).is_ok()
    }

    pub fn total_units(&self) -> u64 {
        self.units.iter().sum()
    }

    pub fn value(&self, units: u64) -> BigRational {
        BigRational::new(BigInt::from(units), BigInt::from(self.scale))
    }

    pub fn value_f64(&self, units: u64) -> f64 {
        units as f64 / self.scale as f64
    }

    /// Exact value as `a` or `a/b`.
    pub fn format_value(&self, units: u64) -> String {
        let v = self.value(units);
        if v.is_integer() { v.to_integer().to_string() } else { v.to_string() }
    }

    /// Instance restricted to the given edges (gifts and children kept).
    pub fn restrict(&self, keep: impl Fn(usize, usize) -> bool) -> Instance {
        let edges = self.edges.iter().copied().filter(|&(c, g)| keep(c, g)).collect();
        Instance::from_units(self.n_children, self.units.clone(), self.scale, edges).expect("subset of valid edges")
    }
}

/// Explicit `(gift, child)` pairs; may be malformed until verified.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
}

impl Assignment {
    pub fn from_owners(owner: &[Option<usize>]) -> Self {
        Assignment { pairs: owner.iter().enumerate().filter_map(|(g, c)| c.map(|c| (g, c))).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    /// Minimum over children, in units; zero when there are no children.
    pub min_units: u64,
    pub per_child: Vec<u64>,
    pub problems: Vec<String>,
}

/// Checks each gift is assigned at most once and only along desire edges,
/// and recomputes every child's total.
pub fn verify_assignment(inst: &Instance, a: &Assignment) -> Verification {
    let mut problems = Vec::new();
    let mut seen = vec![false; inst.n_gifts()];
    let mut per_child = vec![0u64; inst.n_children()];
    for &(g, c) in &a.pairs {
        if g >= inst.n_gifts() || c >= inst.n_children() {
            problems.push(format!("pair ({g}, {c}) out of range"));
            continue;
        }
        if std::mem::replace(&mut seen[g], true) {
            problems.push(format!("gift {g} assigned more than once"));
            continue;
        }
        if !inst.desires(c, g) {
            problems.push(format!("child {c} does not desire gift {g}"));
            continue;
        }
        per_child[c] += inst.units()[g];
    }
    let min_units = per_child.iter().copied().min().unwrap_or(0);
    Verification { valid: problems.is_empty(), min_units, per_child, problems }
}

pub(crate) fn parse_rational(tok: &str) -> Option<BigRational> {
    if let Some((n, d)) = tok.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    if let Some((int, frac)) = tok.split_once('.') {
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().ok()?;
        let d = num::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    tok.parse::<BigInt>().ok().map(BigRational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_values_share_scale() {
        let vals = [parse_rational("1/2").unwrap(), parse_rational("0.75").unwrap(), parse_rational("2").unwrap()];
        let inst = Instance::from_rationals(1, &vals, vec![(0, 0)]).unwrap();
        assert_eq!(inst.scale(), 4);
        assert_eq!(inst.units(), &[2, 3, 8]);
        assert_eq!(inst.format_value(3), "3/4");
    }

    #[test]
    fn verification_flags_duplicates_and_non_edges() {
        let inst = Instance::new(2, vec![1, 1], vec![(0, 0), (1, 1)]).unwrap();
        let ok = verify_assignment(&inst, &Assignment { pairs: vec![(0, 0), (1, 1)] });
        assert!(ok.valid);
        assert_eq!(ok.min_units, 1);
        let dup = verify_assignment(&inst, &Assignment { pairs: vec![(0, 0), (0, 0)] });
        assert!(!dup.valid);
        let stray = verify_assignment(&inst, &Assignment { pairs: vec![(0, 1)] });
        assert!(!stray.valid);
    }
}
