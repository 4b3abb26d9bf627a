//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Intended for desk-scale checking only; every arithmetic step is exact, so
//! verdicts do not depend on tolerances.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub enum ExactLp {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

/// Exact rational for a finite float (binary expansion, no rounding).
pub fn q_from_f64(v: f64) -> Q {
    BigRational::from_float(v).expect("finite float")
}

pub fn q_int(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        self.rhs[r] = &self.rhs[r] / &p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
            self.rhs[i] = &self.rhs[i] - &f * &prhs;
        }
        self.basis[r] = col;
    }

    /// Maximizes `cost · x` over the current basis restricted to `allowed`
    /// columns. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() && !cost[b].is_zero() {
                        reduced -= &cost[b] * &self.rows[i][j];
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, col);
        }
    }
}

/// Maximizes `c · x` subject to `a x ≤ b`, `x ≥ 0`.
pub fn maximize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> ExactLp {
    let r = a.len();
    let n = c.len();
    let artificial: Vec<usize> = (0..r).filter(|&i| b[i].is_negative()).collect();
    let width = n + r + artificial.len();
    let mut rows = Vec::with_capacity(r);
    let mut rhs = Vec::with_capacity(r);
    let mut basis = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = vec![Q::zero(); width];
        let neg = b[i].is_negative();
        let sign = if neg { -Q::one() } else { Q::one() };
        for j in 0..n {
            row[j] = &a[i][j] * &sign;
        }
        row[n + i] = sign.clone();
        if neg {
            let k = artificial.iter().position(|&x| x == i).unwrap();
            row[n + r + k] = Q::one();
            basis.push(n + r + k);
        } else {
            basis.push(n + i);
        }
        rows.push(row);
        rhs.push(&b[i] * &sign);
    }
    let mut t = Tableau { rows, rhs, basis };
    if !artificial.is_empty() {
        let mut phase1 = vec![Q::zero(); width];
        for k in 0..artificial.len() {
            phase1[n + r + k] = -Q::one();
        }
        t.optimize(&phase1, width);
        let infeas: Q = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bcol)| bcol >= n + r)
            .map(|(i, _)| t.rhs[i].clone())
            .sum();
        if infeas.is_positive() {
            return ExactLp::Infeasible;
        }
        // Drive zero-level artificials out of the basis.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + r {
                match (0..n + r).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }
    let mut cost = vec![Q::zero(); width];
    cost[..n].clone_from_slice(c);
    if !t.optimize(&cost, n + r) {
        return ExactLp::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bcol) in t.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = t.rhs[i].clone();
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    ExactLp::Optimal { value, x }
}
