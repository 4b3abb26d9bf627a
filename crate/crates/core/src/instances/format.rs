//! Text formats.
//!
//! Instances: `santa <|C|> <|G|>`, then `gift <id> <value>` for every gift,
//! `edge <child> <gift>` per desire edge, and optionally
//! `frac <child> <gift> <num>/<den>` for a fractional solution. Values may
//! be integers, decimals, or `a/b`. Assignments: one `<gift> <child>` per
//! line. `#` starts a comment.

use std::fmt::Write as _;

use num::BigRational;

use super::{parse_rational, Assignment, Instance, InstanceError};

/// Fractional edge values `(child, gift, value)`.
pub type Fractional = Vec<(usize, usize, BigRational)>;

fn err(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, InstanceError> {
    tok.ok_or_else(|| err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| err(line, format!("bad {what}")))
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then(|| (i + 1, body.split_whitespace().collect()))
    })
}

pub fn parse_instance(text: &str) -> Result<(Instance, Fractional), InstanceError> {
    let mut header: Option<(usize, usize)> = None;
    let mut values: Vec<Option<BigRational>> = Vec::new();
    let mut edges = Vec::new();
    let mut frac = Vec::new();
    for (line, toks) in lines(text) {
        let want = |n: usize| if toks.len() == n { Ok(()) } else { Err(err(line, format!("expected {n} fields"))) };
        if toks[0] == "santa" {
            want(3)?;
            if header.is_some() {
                return Err(err(line, "duplicate header"));
            }
            let c: usize = num(toks.get(1).copied(), line, "child count")?;
            let g: usize = num(toks.get(2).copied(), line, "gift count")?;
            values = vec![None; g];
            header = Some((c, g));
            continue;
        }
        let Some((n_c, n_g)) = header else { return Err(err(line, "entry before header")) };
        match toks[0] {
            "gift" => {
                want(3)?;
                let id: usize = num(Some(toks[1]), line, "gift id")?;
                let v = parse_rational(toks[2]).ok_or_else(|| err(line, "bad value"))?;
                let slot = values.get_mut(id).ok_or_else(|| err(line, format!("gift id {id} >= {n_g}")))?;
                if slot.replace(v).is_some() {
                    return Err(InstanceError::DuplicateGift(id));
                }
            }
            "edge" => {
                want(3)?;
                edges.push((num(Some(toks[1]), line, "child id")?, num(Some(toks[2]), line, "gift id")?));
            }
            "frac" => {
                want(4)?;
                let c: usize = num(Some(toks[1]), line, "child id")?;
                let g: usize = num(Some(toks[2]), line, "gift id")?;
                if c >= n_c || g >= n_g {
                    return Err(err(line, "frac entry out of range"));
                }
                frac.push((c, g, parse_rational(toks[3]).ok_or_else(|| err(line, "bad fraction"))?));
            }
            other => return Err(err(line, format!("unknown tag {other:?}"))),
        }
    }
    let (n_c, _) = header.ok_or_else(|| err(0, "missing header"))?;
    let values = values
        .into_iter()
        .enumerate()
        .map(|(g, v)| v.ok_or(InstanceError::MissingGift(g)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((Instance::from_rationals(n_c, &values, edges)?, frac))
}

pub fn write_instance(inst: &Instance, frac: &[(usize, usize, BigRational)]) -> String {
    let mut s = String::new();
    writeln!(s, "santa {} {}", inst.n_children(), inst.n_gifts()).unwrap();
    for (g, &u) in inst.units().iter().enumerate() {
        writeln!(s, "gift {g} {}", inst.format_value(u)).unwrap();
    }
    for &(c, g) in inst.edges() {
        writeln!(s, "edge {c} {g}").unwrap();
    }
    for (c, g, v) in frac {
        writeln!(s, "frac {c} {g} {}/{}", v.numer(), v.denom()).unwrap();
    }
    s
}

pub fn parse_assignment(text: &str) -> Result<Assignment, InstanceError> {
    let mut pairs = Vec::new();
    for (line, toks) in lines(text) {
        if toks.len() != 2 {
            return Err(err(line, "expected `<gift> <child>`"));
        }
        pairs.push((num(Some(toks[0]), line, "gift id")?, num(Some(toks[1]), line, "child id")?));
    }
    Ok(Assignment { pairs })
}

pub fn write_assignment(a: &Assignment) -> String {
    let mut s = String::new();
    for (g, c) in &a.pairs {
        writeln!(s, "{g} {c}").unwrap();
    }
    s
}
