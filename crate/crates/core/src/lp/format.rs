//! Text format: a header `mpc <n_p> <n_c> <m>`, then sparse entries
//! `P j i val` and `C j i val`, then bounds `p j val` and `c j val`.
//! Missing bounds default to 1. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use super::{LpError, MixedLP};

fn err(line: usize, msg: impl Into<String>) -> LpError {
    LpError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, LpError> {
    tok.ok_or_else(|| err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| err(line, format!("bad {what}")))
}

pub fn parse_lp(text: &str) -> Result<MixedLP, LpError> {
    let mut header = None;
    let mut p = Vec::new();
    let mut c = Vec::new();
    let mut pb: Vec<Option<f64>> = Vec::new();
    let mut cb: Vec<Option<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let tag = toks.next().unwrap();
        if tag == "mpc" {
            if header.is_some() {
                return Err(err(line, "duplicate header"));
            }
            let n_p: usize = field(toks.next(), line, "n_p")?;
            let n_c: usize = field(toks.next(), line, "n_c")?;
            let m: usize = field(toks.next(), line, "m")?;
            pb = vec![None; n_p];
            cb = vec![None; n_c];
            header = Some((n_p, n_c, m));
        } else {
            let Some((n_p, n_c, _)) = header else { return Err(err(line, "entry before header")) };
            match tag {
                "P" | "C" => {
                    let j: usize = field(toks.next(), line, "row")?;
                    let i: usize = field(toks.next(), line, "column")?;
                    let v: f64 = field(toks.next(), line, "value")?;
                    if tag == "P" { p.push((j, i, v)) } else { c.push((j, i, v)) }
                }
                "p" | "c" => {
                    let j: usize = field(toks.next(), line, "row")?;
                    let v: f64 = field(toks.next(), line, "bound")?;
                    let (slot, n) = if tag == "p" { (&mut pb, n_p) } else { (&mut cb, n_c) };
                    if j >= n {
                        return Err(err(line, format!("bound row {j} out of range")));
                    }
                    if slot[j].replace(v).is_some() {
                        return Err(err(line, format!("bound {tag} {j} given twice")));
                    }
                }
                other => return Err(err(line, format!("unknown tag {other:?}"))),
            }
        }
        if toks.next().is_some() {
            return Err(err(line, "trailing tokens"));
        }
    }
    let (n_p, n_c, m) = header.ok_or_else(|| err(0, "missing header"))?;
    let fill = |b: Vec<Option<f64>>| b.into_iter().map(|v| v.unwrap_or(1.0)).collect();
    MixedLP::from_triples(n_p, n_c, m, &p, &c, fill(pb), fill(cb))
}

pub fn write_lp(lp: &MixedLP) -> String {
    let mut s = String::new();
    writeln!(s, "mpc {} {} {}", lp.n_p(), lp.n_c(), lp.m()).unwrap();
    for (tag, rows) in [("P", lp.p_rows()), ("C", lp.c_rows())] {
        for (j, row) in rows.iter().enumerate() {
            for &(i, v) in row {
                writeln!(s, "{tag} {j} {i} {v:?}").unwrap();
            }
        }
    }
    for (tag, b) in [("p", lp.p_bound()), ("c", lp.c_bound())] {
        for (j, v) in b.iter().enumerate() {
            writeln!(s, "{tag} {j} {v:?}").unwrap();
        }
    }
    s
}
