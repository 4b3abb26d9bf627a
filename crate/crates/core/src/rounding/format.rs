//! Graph text format for cycle rounding: `graph <n> <m>`, then one
//! `e <u> <v> <w> [cap]` per edge (cap defaults to 1). Weights may be
//! integers, decimals, or `a/b`. `#` starts a comment.

use std::fmt::Write as _;

use num::{BigInt, BigRational};

use super::{RoundingError, Weight, WeightedGraph};
use crate::instances::parse_rational;

fn err(line: usize, msg: impl Into<String>) -> RoundingError {
    RoundingError::Parse { line, msg: msg.into() }
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph<BigRational>, RoundingError> {
    let mut header: Option<(usize, usize)> = None;
    let (mut edges, mut w, mut cap) = (Vec::new(), Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let int = |k: usize, what: &str| -> Result<usize, RoundingError> {
            toks.get(k).ok_or_else(|| err(line, format!("missing {what}")))?.parse().map_err(|_| err(line, format!("bad {what}")))
        };
        let rat = |k: usize, what: &str| -> Result<BigRational, RoundingError> {
            parse_rational(toks.get(k).ok_or_else(|| err(line, format!("missing {what}")))?).ok_or_else(|| err(line, format!("bad {what}")))
        };
        match (toks[0], header) {
            ("graph", None) if toks.len() == 3 => header = Some((int(1, "n")?, int(2, "m")?)),
            ("e", Some(_)) if (4..=5).contains(&toks.len()) => {
                edges.push((int(1, "endpoint")?, int(2, "endpoint")?));
                w.push(rat(3, "weight")?);
                cap.push(if toks.len() == 5 { rat(4, "cap")? } else { BigRational::from_integer(BigInt::from(1)) });
            }
            ("graph", _) => return Err(err(line, "bad or repeated header")),
            (_, None) => return Err(err(line, "expected `graph <n> <m>` first")),
            _ => return Err(err(line, "expected `e <u> <v> <w> [cap]`")),
        }
    }
    let (n, m) = header.ok_or_else(|| err(0, "empty input"))?;
    if edges.len() != m {
        return Err(err(0, format!("header says {m} edges, found {}", edges.len())));
    }
    WeightedGraph::new(n, edges, w, cap)
}

pub fn write_graph<W: Weight>(n: usize, edges: &[(usize, usize)], w: &[W], cap: &[W]) -> String {
    let mut s = String::new();
    writeln!(s, "graph {n} {}", edges.len()).unwrap();
    for (k, &(a, b)) in edges.iter().enumerate() {
        writeln!(s, "e {a} {b} {} {}", w[k], cap[k]).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = parse_graph("graph 4 3\ne 0 1 1/2\ne 1 2 0.25 2\n# c\ne 2 3 1\n").unwrap();
        assert_eq!(g.cap[1], BigRational::from_integer(2.into()));
        let again = parse_graph(&write_graph(g.n, &g.edges, &g.w, &g.cap)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn rejects_count_mismatch() {
        assert!(matches!(parse_graph("graph 2 2\ne 0 1 1\n"), Err(RoundingError::Parse { .. })));
    }
}
