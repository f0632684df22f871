//! DIMACS CNF reading and writing.
//!
//! The writer emits `p cnf <n> <m>` followed by one clause per line, literal
//! order preserved. When parameters are known it prepends a single comment
//! line of the form `c polarsat k=3 p=0.25 seed=7`, which the reader picks up
//! again as a width hint.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::{Clause, Formula, Literal, Sign};

const META_TAG: &str = "polarsat";

/// Generator parameters recorded in (and recovered from) a comment line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DimacsMeta {
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub seed: Option<u64>,
}

impl DimacsMeta {
    fn is_empty(&self) -> bool {
        self.k.is_none() && self.p.is_none() && self.seed.is_none()
    }

    fn comment_line(&self) -> String {
        let mut s = format!("c {META_TAG}");
        if let Some(k) = self.k {
            let _ = write!(s, " k={k}");
        }
        if let Some(p) = self.p {
            let _ = write!(s, " p={p}");
        }
        if let Some(seed) = self.seed {
            let _ = write!(s, " seed={seed}");
        }
        s
    }

    fn parse_comment(body: &str) -> Option<DimacsMeta> {
        let mut words = body.split_whitespace();
        if words.next() != Some(META_TAG) {
            return None;
        }
        let mut meta = DimacsMeta::default();
        for w in words {
            let Some((key, value)) = w.split_once('=') else {
                continue;
            };
            match key {
                "k" => meta.k = value.parse().ok(),
                "p" => meta.p = value.parse().ok(),
                "seed" => meta.seed = value.parse().ok(),
                _ => {}
            }
        }
        Some(meta)
    }
}

/// Plain DIMACS text without a parameter comment.
pub fn to_dimacs(formula: &Formula) -> String {
    to_dimacs_with_meta(formula, &DimacsMeta::default())
}

pub fn to_dimacs_with_meta(formula: &Formula, meta: &DimacsMeta) -> String {
    let mut out = String::with_capacity(16 + formula.m() * (formula.k() * 7 + 2));
    if !meta.is_empty() {
        out.push_str(&meta.comment_line());
        out.push('\n');
    }
    let _ = writeln!(out, "p cnf {} {}", formula.n(), formula.m());
    for clause in formula.clauses() {
        for lit in clause.literals() {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS text; the width is taken from a `c polarsat k=..` comment
/// when present, otherwise from the first clause.
pub fn from_dimacs(text: &str) -> Result<Formula> {
    parse_dimacs(text, None).map(|(f, _)| f)
}

/// Parses DIMACS text requiring every clause to have width `k`.
pub fn from_dimacs_with_width(text: &str, k: usize) -> Result<Formula> {
    parse_dimacs(text, Some(k)).map(|(f, _)| f)
}

/// Full parser returning the formula together with any recorded metadata.
pub fn parse_dimacs(text: &str, width: Option<usize>) -> Result<(Formula, DimacsMeta)> {
    let mut meta = DimacsMeta::default();
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut clause_line = 0;
    let mut k = width;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: line_no, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('c') {
            if body.is_empty() || body.starts_with(char::is_whitespace) {
                if let Some(m) = DimacsMeta::parse_comment(body) {
                    if k.is_none() {
                        k = m.k;
                    }
                    meta = m;
                }
                continue;
            }
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err("duplicate header".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(err(format!("malformed header {line:?}")));
            }
            let n = fields[2]
                .parse::<usize>()
                .map_err(|_| err(format!("bad variable count {:?}", fields[2])))?;
            let m = fields[3]
                .parse::<usize>()
                .map_err(|_| err(format!("bad clause count {:?}", fields[3])))?;
            if n > u32::MAX as usize {
                return Err(err(format!("variable count {n} too large")));
            }
            clauses.reserve(m.min(1 << 16));
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(err("clause before header".into()));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| err(format!("bad literal {tok:?}")))?;
            if current.is_empty() {
                clause_line = line_no;
            }
            if v == 0 {
                let lits = std::mem::take(&mut current);
                let clause = Clause::from_literals(lits).map_err(|e| err(e.to_string()))?;
                let want = *k.get_or_insert(clause.width());
                if clause.width() != want {
                    return Err(err(format!(
                        "clause width {} but formula width is {want}",
                        clause.width()
                    )));
                }
                clauses.push(clause);
                continue;
            }
            let var = v.unsigned_abs();
            if var > n as u64 {
                return Err(err(format!("literal {v} outside 1..={n}")));
            }
            let sign = if v > 0 { Sign::Pos } else { Sign::Neg };
            current.push(Literal::new(var as u32, sign)?);
        }
    }

    let Some((n, m)) = header else {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "missing header".into(),
        });
    };
    if !current.is_empty() {
        return Err(Error::Parse {
            line: clause_line,
            msg: "clause not terminated by 0".into(),
        });
    }
    if clauses.len() != m {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("header declares {m} clauses, found {}", clauses.len()),
        });
    }
    let formula = Formula::from_clauses(n, k.unwrap_or(0), clauses)?;
    Ok((formula, meta))
}
