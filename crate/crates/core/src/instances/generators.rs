//! Instance families. Every generator is a pure function of its arguments.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::format::Fractional;
use super::{Assignment, Instance, InstanceError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub children: usize,
    pub gifts: usize,
    /// Inclusive integer value range.
    pub min_value: u64,
    pub max_value: u64,
    /// Independent probability of each desire edge.
    pub density: f64,
}

pub fn gen_random(p: &RandomParams, seed: u64) -> Result<Instance, InstanceError> {
    if !(0.0..=1.0).contains(&p.density) {
        return Err(InstanceError::BadParam(format!("density {} outside [0, 1]", p.density)));
    }
    if p.min_value > p.max_value {
        return Err(InstanceError::BadParam("min_value exceeds max_value".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..p.gifts).map(|_| rng.gen_range(p.min_value..=p.max_value)).collect();
    let mut edges = Vec::new();
    for c in 0..p.children {
        for g in 0..p.gifts {
            if rng.gen_bool(p.density) {
                edges.push((c, g));
            }
        }
    }
    Instance::new(p.children, values, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathVariant {
    I1,
    I2,
    I3,
}

impl std::str::FromStr for PathVariant {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "I1" => Ok(PathVariant::I1),
            "I2" => Ok(PathVariant::I2),
            "I3" => Ok(PathVariant::I3),
            _ => Err(InstanceError::BadParam(format!("unknown path variant {s:?}"))),
        }
    }
}

/// Alternating path of `n` children and `n - 1` unit gifts; gift `j` sits
/// between children `j` and `j + 1`. I2 and I3 add gift `n - 1` at the
/// left or right end.
pub fn gen_path(variant: PathVariant, n: usize) -> Result<Instance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::BadParam("path needs at least one child".into()));
    }
    let mut edges: Vec<(usize, usize)> = (0..n - 1).flat_map(|j| [(j, j), (j + 1, j)]).collect();
    let gifts = match variant {
        PathVariant::I1 => n - 1,
        PathVariant::I2 => {
            edges.push((0, n - 1));
            n
        }
        PathVariant::I3 => {
            edges.push((n - 1, n - 1));
            n
        }
    };
    Instance::new(n, vec![1; gifts], edges)
}

/// The shifted assignment: in I2 every gift goes to the child on its right
/// (the end gift to child 0), in I3 and I1 to the child on its left.
pub fn path_assignment(variant: PathVariant, n: usize) -> Assignment {
    let mut pairs: Vec<(usize, usize)> = match variant {
        PathVariant::I2 => (0..n.saturating_sub(1)).map(|j| (j, j + 1)).collect(),
        _ => (0..n.saturating_sub(1)).map(|j| (j, j)).collect(),
    };
    match variant {
        PathVariant::I1 => {}
        PathVariant::I2 => pairs.push((n - 1, 0)),
        PathVariant::I3 => pairs.push((n - 1, n - 1)),
    }
    pairs.sort_unstable();
    Assignment { pairs }
}

/// Where the parts of an SC_n instance live.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScnLayout {
    pub side: usize,
    /// Leaves after padding to a power of two.
    pub leaves: usize,
    pub alice: usize,
    pub bob: usize,
    /// `path_children[i][j]` is child `c_j` of path `i`.
    pub path_children: Vec<Vec<usize>>,
    pub path_gifts: Vec<Vec<usize>>,
    pub tree_children: Vec<usize>,
    pub tree_gifts: Vec<usize>,
    /// Depth of the tree in edges.
    pub tree_height: usize,
}

impl ScnLayout {
    /// Node count predicted from the construction.
    pub fn predicted_nodes(&self) -> usize {
        let s = self.side;
        let tree_nodes = 2 * self.leaves - 1;
        let tree_children: usize = (0..=self.tree_height).step_by(2).map(|h| self.leaves >> h).sum();
        s * (2 * s - 1) + tree_nodes + tree_children + 4 + 2 * s
    }

    /// Every node reaches a leaf within five hops (the farthest is Alice's
    /// private gift: Alice, boundary gift, path child, path gift, leaf), so
    /// the diameter is at most `2 (height + 5)`.
    pub fn diameter_bound(&self) -> usize {
        2 * (self.tree_height + 5)
    }
}

/// Alice's set is `{i : a_i = 0}` and Bob's is `{i : b_i = 0}`: a set bit
/// puts a unit gift on that path's boundary. SC_n has optimum 1 exactly
/// when the two sets are disjoint, and 0 otherwise.
pub fn scn_sets_disjoint(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x || y)
}

/// SC_n: `√n` alternating paths hung under a binary tree with alternating
/// child/gift levels, plus Alice and Bob whose boundary gifts carry the
/// input bits. The tree is padded to a power-of-two number of leaves; leaf
/// `j` desires gift `j` of every path (the last leaf has no such gift).
pub fn gen_scn(n: usize, a: &[bool], b: &[bool]) -> Result<(Instance, ScnLayout), InstanceError> {
    let s = (n as f64).sqrt().round() as usize;
    if n < 4 || s * s != n {
        return Err(InstanceError::BadParam(format!("n = {n} is not a perfect square of at least 4")));
    }
    if a.len() != s || b.len() != s {
        return Err(InstanceError::BadParam(format!("bit strings must have length {s}")));
    }
    let mut children = 0usize;
    let mut values: Vec<u64> = Vec::new();
    let mut edges = Vec::new();
    let mut child = || {
        children += 1;
        children - 1
    };
    let gift = |v: u64, values: &mut Vec<u64>| {
        values.push(v);
        values.len() - 1
    };

    let mut path_children = Vec::with_capacity(s);
    let mut path_gifts = Vec::with_capacity(s);
    for _ in 0..s {
        let cs: Vec<usize> = (0..s).map(|_| child()).collect();
        let gs: Vec<usize> = (0..s - 1).map(|_| gift(1, &mut values)).collect();
        for (j, &g) in gs.iter().enumerate() {
            edges.push((cs[j], g));
            edges.push((cs[j + 1], g));
        }
        path_children.push(cs);
        path_gifts.push(gs);
    }

    let leaves = s.next_power_of_two();
    let height = leaves.trailing_zeros() as usize;
    let mut tree_children = Vec::new();
    let mut tree_gifts = Vec::new();
    let mut below: Vec<usize> = Vec::new();
    for h in 0..=height {
        let is_child = h % 2 == 0;
        let level: Vec<usize> = (0..leaves >> h)
            .map(|_| {
                if is_child {
                    let c = child();
                    let p = gift(1, &mut values);
                    edges.push((c, p));
                    tree_children.push(c);
                    c
                } else {
                    let g = gift(1, &mut values);
                    tree_gifts.push(g);
                    g
                }
            })
            .collect();
        for (k, &node) in level.iter().enumerate() {
            for &sub in &below[(2 * k).min(below.len())..(2 * k + 2).min(below.len())] {
                edges.push(if is_child { (node, sub) } else { (sub, node) });
            }
        }
        if h == 0 {
            for (j, &leaf) in level.iter().enumerate().take(s - 1) {
                for gs in &path_gifts {
                    edges.push((leaf, gs[j]));
                }
            }
        }
        below = level;
    }

    let alice = child();
    let bob = child();
    for (who, bits, end) in [(alice, a, 0), (bob, b, s - 1)] {
        let p = gift(1, &mut values);
        edges.push((who, p));
        for (i, &bit) in bits.iter().enumerate() {
            let g = gift(u64::from(bit), &mut values);
            edges.push((who, g));
            edges.push((path_children[i][end], g));
        }
    }
    let inst = Instance::new(children, values, edges)?;
    let layout = ScnLayout {
        side: s,
        leaves,
        alice,
        bob,
        path_children,
        path_gifts,
        tree_children,
        tree_gifts,
        tree_height: height,
    };
    Ok((inst, layout))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsificationExample {
    pub instance: Instance,
    /// Nonzero fractional edges; every other edge has value zero.
    pub fractional: Fractional,
    pub big: Vec<usize>,
    pub small: Vec<usize>,
}

/// `k` children on a path through `k - 1` big gifts of value `t`, and `t`
/// unit gifts desired by everyone. Child `j` holds `(k-1-j)/k` of big gift
/// `j` and `j/k` of big gift `j - 1`, plus `t/k` exclusive small gifts.
pub fn gen_sparsification_example(k: usize, t: u64) -> Result<SparsificationExample, InstanceError> {
    if k < 2 || t < k as u64 || t % k as u64 != 0 {
        return Err(InstanceError::BadParam(format!("need k >= 2 and t a multiple of k with t >= k (k = {k}, t = {t})")));
    }
    let ku = k as u64;
    let big: Vec<usize> = (0..k - 1).collect();
    let small: Vec<usize> = (k - 1..k - 1 + t as usize).collect();
    let mut values = vec![t; k - 1];
    values.extend(std::iter::repeat(1).take(t as usize));
    let mut edges = Vec::new();
    let mut frac: Fractional = Vec::new();
    let q = |num: u64| BigRational::new(num.into(), ku.into());
    for &b in &big {
        edges.push((b, b));
        edges.push((b + 1, b));
        frac.push((b, b, q(ku - 1 - b as u64)));
        frac.push((b + 1, b, q(b as u64 + 1)));
    }
    let share = (t / ku) as usize;
    for c in 0..k {
        for (idx, &g) in small.iter().enumerate() {
            edges.push((c, g));
            if idx / share == c {
                frac.push((c, g, q(ku)));
            }
        }
    }
    frac.sort_by_key(|e| (e.0, e.1));
    Ok(SparsificationExample { instance: Instance::new(k, values, edges)?, fractional: frac, big, small })
}
