//! Exact verdicts for small mixed LPs, computed with [`super::simplex`]
//! and sharing no code with the iterative solver.

use num::{One, Zero};

use super::simplex::{maximize, q_from_f64, ExactLp, Q};
use super::OracleError;
use crate::lp::MixedLP;

/// Largest dense system (rows and columns) the oracle accepts.
pub const LP_ORACLE_CAP: usize = 64;

fn check_size(lp: &MixedLP) -> Result<(), OracleError> {
    let rows = lp.n_p() + lp.n_c();
    if rows > LP_ORACLE_CAP || lp.m() > LP_ORACLE_CAP {
        return Err(OracleError::LpTooLarge { rows, cols: lp.m(), cap: LP_ORACLE_CAP });
    }
    Ok(())
}

fn dense(rows: &[Vec<(usize, f64)>], m: usize, sign: i32) -> Vec<Vec<Q>> {
    rows.iter()
        .map(|r| {
            let mut out = vec![Q::zero(); m];
            for &(i, v) in r {
                out[i] = if sign < 0 { -q_from_f64(v) } else { q_from_f64(v) };
            }
            out
        })
        .collect()
}

/// Decides whether `{C x ≥ c, P x ≤ slack·p, x ≥ 0}` has a solution.
pub fn lp_feasibility_oracle(lp: &MixedLP, slack: f64) -> Result<bool, OracleError> {
    check_size(lp)?;
    let m = lp.m();
    let s = q_from_f64(slack);
    let mut a = dense(lp.p_rows(), m, 1);
    let mut b: Vec<Q> = lp.p_bound().iter().map(|&v| q_from_f64(v) * &s).collect();
    a.extend(dense(lp.c_rows(), m, -1));
    b.extend(lp.c_bound().iter().map(|&v| -q_from_f64(v)));
    let cost = vec![Q::zero(); m];
    Ok(!matches!(maximize(&a, &b, &cost), ExactLp::Infeasible))
}

/// Exact `γ* = max { γ : P x ≤ p, C x ≥ γ c, x ≥ 0 }`, or `None` when
/// unbounded.
pub fn exact_gamma(lp: &MixedLP) -> Result<Option<Q>, OracleError> {
    check_size(lp)?;
    let m = lp.m();
    let mut a: Vec<Vec<Q>> = dense(lp.p_rows(), m, 1);
    for row in a.iter_mut() {
        row.push(Q::zero());
    }
    let mut b: Vec<Q> = lp.p_bound().iter().map(|&v| q_from_f64(v)).collect();
    for (row, &cj) in dense(lp.c_rows(), m, -1).into_iter().zip(lp.c_bound()) {
        let mut row = row;
        row.push(q_from_f64(cj));
        a.push(row);
        b.push(Q::zero());
    }
    let mut cost = vec![Q::zero(); m];
    cost.push(Q::one());
    match maximize(&a, &b, &cost) {
        ExactLp::Optimal { value, .. } => Ok(Some(value)),
        ExactLp::Unbounded => Ok(None),
        ExactLp::Infeasible => unreachable!("x = 0, γ = 0 is always feasible"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::simplex::q_int;

    #[test]
    fn unit_lp_slack_boundary() {
        let lp = MixedLP::unit(1, 1, 1, &[(0, 0, 1.0)], &[(0, 0, 1.0)]).unwrap();
        assert!(!lp_feasibility_oracle(&lp, 0.9).unwrap());
        assert!(lp_feasibility_oracle(&lp, 1.0).unwrap());
        assert_eq!(exact_gamma(&lp).unwrap(), Some(q_int(1)));
    }

    #[test]
    fn two_edge_matching_path() {
        // Vertices a, b, c; edges e0 = ab, e1 = bc.
        let rows = [(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 1.0)];
        let lp = MixedLP::unit(3, 3, 2, &rows, &rows).unwrap();
        assert!(!lp_feasibility_oracle(&lp, 1.0).unwrap());
        assert_eq!(exact_gamma(&lp).unwrap(), Some(Q::new(1.into(), 2.into())));
    }
}
