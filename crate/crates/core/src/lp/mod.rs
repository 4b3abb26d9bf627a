//! Mixed packing-covering linear programs and their multiplicative-weights
//! solver.
//!
//! A [`MixedLP`] holds nonnegative sparse packing rows `P x ≤ p` and covering
//! rows `C x ≥ c`. The solver works on the unit-bound form obtained by
//! [`MixedLP::normalize`].

pub mod format;
pub mod kernel;
pub mod optimize;
pub mod quantize;
pub mod simulated;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::SimError;

pub use kernel::{run_kernel, InfeasibleKind, KernelRun, Params, SolverConfig, StopReason, Verdict};
pub use optimize::{solve_feasibility, solve_feasibility_with, solve_max, solve_max_with, Feasibility, MaxSolution};
pub use quantize::{Quantized, Quantizer};
pub use simulated::{simulate_kernel, SimulatedRun};

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("{kind} entry ({row}, {col}) = {value} is negative or not finite")]
    BadEntry { kind: char, row: usize, col: usize, value: f64 },
    #[error("{kind} entry ({row}, {col}) is out of range")]
    OutOfRange { kind: char, row: usize, col: usize },
    #[error("{kind} entry ({row}, {col}) appears twice")]
    Duplicate { kind: char, row: usize, col: usize },
    #[error("variable {0} has no nonzero coefficient")]
    IsolatedVariable(usize),
    #[error("{kind} row {row} has bound {value}; bounds must be positive")]
    BadBound { kind: char, row: usize, value: f64 },
    #[error("bound vector for {kind} has {got} entries, expected {expected}")]
    BoundCount { kind: char, got: usize, expected: usize },
    #[error("epsilon {0} outside (0, 1/2]")]
    EpsOutOfRange(f64),
    #[error("epsilon {eps} is below {floor:e}; use the exact oracle for such precision")]
    EpsTooSmall { eps: f64, floor: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("the LP has no covering rows, so the covering level is unbounded")]
    NoCoveringRows,
    #[error("every covering row can be satisfied without touching a packing row")]
    Unbounded,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Sim(#[from] SimError),
}

type Entries = Vec<Vec<(usize, f64)>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedLP {
    m: usize,
    p_rows: Entries,
    c_rows: Entries,
    p_bound: Vec<f64>,
    c_bound: Vec<f64>,
    p_cols: Entries,
    c_cols: Entries,
}

fn build_rows(kind: char, rows: usize, m: usize, triples: &[(usize, usize, f64)]) -> Result<Entries, LpError> {
    let mut out: Entries = vec![Vec::new(); rows];
    for &(row, col, value) in triples {
        if !(value.is_finite() && value >= 0.0) {
            return Err(LpError::BadEntry { kind, row, col, value });
        }
        if row >= rows || col >= m {
            return Err(LpError::OutOfRange { kind, row, col });
        }
        if value > 0.0 {
            out[row].push((col, value));
        }
    }
    for (row, list) in out.iter_mut().enumerate() {
        list.sort_by_key(|e| e.0);
        if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(LpError::Duplicate { kind, row, col: w[0].0 });
        }
    }
    Ok(out)
}

fn transpose(rows: &Entries, m: usize) -> Entries {
    let mut cols: Entries = vec![Vec::new(); m];
    for (j, row) in rows.iter().enumerate() {
        for &(i, v) in row {
            cols[i].push((j, v));
        }
    }
    cols
}

impl MixedLP {
    /// Builds an LP from `(row, column, value)` triples. Zero entries are
    /// dropped; every variable must keep at least one nonzero.
    pub fn from_triples(
        n_p: usize,
        n_c: usize,
        m: usize,
        p: &[(usize, usize, f64)],
        c: &[(usize, usize, f64)],
        p_bound: Vec<f64>,
        c_bound: Vec<f64>,
    ) -> Result<Self, LpError> {
        if p_bound.len() != n_p {
            return Err(LpError::BoundCount { kind: 'p', got: p_bound.len(), expected: n_p });
        }
        if c_bound.len() != n_c {
            return Err(LpError::BoundCount { kind: 'c', got: c_bound.len(), expected: n_c });
        }
        for (kind, bounds) in [('p', &p_bound), ('c', &c_bound)] {
            if let Some((row, &value)) = bounds.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
                return Err(LpError::BadBound { kind, row, value });
            }
        }
        let p_rows = build_rows('P', n_p, m, p)?;
        let c_rows = build_rows('C', n_c, m, c)?;
        let p_cols = transpose(&p_rows, m);
        let c_cols = transpose(&c_rows, m);
        if let Some(i) = (0..m).find(|&i| p_cols[i].is_empty() && c_cols[i].is_empty()) {
            return Err(LpError::IsolatedVariable(i));
        }
        Ok(MixedLP { m, p_rows, c_rows, p_bound, c_bound, p_cols, c_cols })
    }

    /// LP with all bounds equal to one.
    pub fn unit(n_p: usize, n_c: usize, m: usize, p: &[(usize, usize, f64)], c: &[(usize, usize, f64)]) -> Result<Self, LpError> {
        Self::from_triples(n_p, n_c, m, p, c, vec![1.0; n_p], vec![1.0; n_c])
    }

    /// Divides each row by its bound. Zero bounds are rejected.
    pub fn normalize(&self) -> Result<MixedLP, LpError> {
        for (kind, bounds) in [('p', &self.p_bound), ('c', &self.c_bound)] {
            if let Some((row, &value)) = bounds.iter().enumerate().find(|(_, v)| **v <= 0.0) {
                return Err(LpError::BadBound { kind, row, value });
            }
        }
        let scale = |rows: &Entries, b: &[f64]| -> Entries {
            rows.iter().zip(b).map(|(r, &d)| r.iter().map(|&(i, v)| (i, v / d)).collect()).collect()
        };
        let p_rows = scale(&self.p_rows, &self.p_bound);
        let c_rows = scale(&self.c_rows, &self.c_bound);
        Ok(MixedLP {
            m: self.m,
            p_cols: transpose(&p_rows, self.m),
            c_cols: transpose(&c_rows, self.m),
            p_rows,
            c_rows,
            p_bound: vec![1.0; self.n_p()],
            c_bound: vec![1.0; self.n_c()],
        })
    }

    /// Same LP with every packing coefficient multiplied by `factor`.
    pub fn scale_packing(&self, factor: f64) -> MixedLP {
        let p_rows: Entries = self.p_rows.iter().map(|r| r.iter().map(|&(i, v)| (i, v * factor)).collect()).collect();
        MixedLP { p_cols: transpose(&p_rows, self.m), p_rows, ..self.clone() }
    }

    pub fn is_normalized(&self) -> bool {
        self.p_bound.iter().chain(&self.c_bound).all(|&b| b == 1.0)
    }

    pub fn n_p(&self) -> usize {
        self.p_rows.len()
    }

    pub fn n_c(&self) -> usize {
        self.c_rows.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.p_rows
    }

    pub fn c_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.c_rows
    }

    /// Packing column of variable `i` as `(row, value)`, rows increasing.
    pub fn p_col(&self, i: usize) -> &[(usize, f64)] {
        &self.p_cols[i]
    }

    pub fn c_col(&self, i: usize) -> &[(usize, f64)] {
        &self.c_cols[i]
    }

    pub fn p_bound(&self) -> &[f64] {
        &self.p_bound
    }

    pub fn c_bound(&self) -> &[f64] {
        &self.c_bound
    }

    pub fn nnz(&self) -> usize {
        self.p_rows.iter().chain(&self.c_rows).map(Vec::len).sum()
    }

    /// Packing loads `P_j x / p_j` and covering levels `C_j x / c_j`.
    pub fn evaluate(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let eval = |rows: &Entries, b: &[f64]| -> Vec<f64> {
            rows.iter()
                .zip(b)
                .map(|(r, &d)| crate::fsum::fsum(r.iter().map(|&(i, v)| v * x[i])) / d)
                .collect()
        };
        (eval(&self.p_rows, &self.p_bound), eval(&self.c_rows, &self.c_bound))
    }

    /// `max_j (Px)_j / min_j (Cx)_j` in bound-relative terms.
    pub fn ratio(&self, x: &[f64]) -> f64 {
        let (px, cx) = self.evaluate(x);
        let hi = px.iter().copied().fold(0.0, f64::max);
        let lo = cx.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo
    }

    /// Checks `0 < max Px ≤ (1+eps) min Cx`.
    pub fn is_eps_feasible(&self, x: &[f64], eps: f64) -> bool {
        let (px, cx) = self.evaluate(x);
        let hi = px.iter().copied().fold(0.0, f64::max);
        let lo = cx.iter().copied().fold(f64::INFINITY, f64::min);
        hi > 0.0 && hi <= (1.0 + eps) * lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_divides_rows() {
        let lp = MixedLP::from_triples(1, 1, 1, &[(0, 0, 2.0)], &[(0, 0, 1.0)], vec![4.0], vec![1.0]).unwrap();
        let n = lp.normalize().unwrap();
        assert_eq!(n.p_rows()[0], vec![(0, 0.5)]);
        assert!(n.is_normalized());
    }

    #[test]
    fn identity_is_unchanged() {
        let id: Vec<_> = (0..3).map(|i| (i, i, 1.0)).collect();
        let lp = MixedLP::unit(3, 3, 3, &id, &id).unwrap();
        assert_eq!(lp.normalize().unwrap(), lp);
    }

    #[test]
    fn zero_bound_and_isolated_variable_rejected() {
        let e = MixedLP::from_triples(1, 0, 1, &[(0, 0, 1.0)], &[], vec![0.0], vec![]).unwrap().normalize();
        assert!(matches!(e, Err(LpError::BadBound { .. })));
        let e = MixedLP::unit(1, 0, 2, &[(0, 0, 1.0)], &[]);
        assert_eq!(e, Err(LpError::IsolatedVariable(1)));
        let e = MixedLP::unit(1, 0, 1, &[(0, 0, -1.0)], &[]);
        assert!(matches!(e, Err(LpError::BadEntry { .. })));
    }
}
