//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the solver or the digraph code under test.

#![allow(dead_code)]

use polarsat::{Formula, Literal};

/// Clauses as (positive mask, negative mask) over bit `v-1`.
pub fn masks(f: &Formula) -> Vec<(u64, u64)> {
    f.clauses()
        .iter()
        .map(|c| {
            c.literals().iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u64 << (l.var() - 1);
                if l.is_pure() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect()
}

pub fn satisfies(masks: &[(u64, u64)], bits: u64) -> bool {
    masks.iter().all(|&(pos, neg)| bits & pos != 0 || !bits & neg != 0)
}

/// Every model of `f`, as bitmasks.
pub fn models(f: &Formula) -> Vec<u64> {
    assert!(f.n() <= 24, "enumeration is limited to small formulas");
    let cs = masks(f);
    (0..1u64 << f.n()).filter(|&b| satisfies(&cs, b)).collect()
}

pub fn is_sat(f: &Formula) -> bool {
    let cs = masks(f);
    (0..1u64 << f.n()).any(|b| satisfies(&cs, b))
}

/// Variables that take the same value in every model: (locked TRUE, locked FALSE).
pub fn spines(n: usize, models: &[u64]) -> (Vec<u32>, Vec<u32>) {
    assert!(!models.is_empty());
    let all = models.iter().fold(u64::MAX, |a, &m| a & m);
    let none = models.iter().fold(0, |a, &m| a | m);
    let pos = (1..=n as u32).filter(|v| all >> (v - 1) & 1 == 1).collect();
    let neg = (1..=n as u32).filter(|v| none >> (v - 1) & 1 == 0).collect();
    (pos, neg)
}

/// Arcs `¬a → b` and `¬b → a` of each 2-clause `(a ∨ b)`, as DIMACS integers.
pub fn implication_arcs(f: &Formula) -> Vec<(i64, i64)> {
    let mut arcs = Vec::new();
    for c in f.clauses() {
        let l = c.literals();
        let (a, b) = (l[0].to_dimacs(), l[1].to_dimacs());
        arcs.push((-a, b));
        arcs.push((-b, a));
    }
    arcs
}

fn vertex(l: i64, n: usize) -> usize {
    if l > 0 {
        l as usize - 1
    } else {
        n + (-l) as usize - 1
    }
}

fn literal(v: usize, n: usize) -> i64 {
    if v < n {
        v as i64 + 1
    } else {
        -((v - n) as i64 + 1)
    }
}

/// All simple directed cycles, each listed once, rotated to start at its
/// smallest vertex (positive literals first, then negative, by variable).
pub fn simple_cycles(n: usize, arcs: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let size = 2 * n;
    let mut adj = vec![Vec::new(); size];
    for &(a, b) in arcs {
        let (u, w) = (vertex(a, n), vertex(b, n));
        if !adj[u].contains(&w) {
            adj[u].push(w);
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on_path = vec![false; size];
    fn dfs(
        start: usize,
        u: usize,
        adj: &[Vec<usize>],
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        for &w in &adj[u] {
            if w == start {
                out.push(path.clone());
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(start, w, adj, path, on_path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let mut raw = Vec::new();
    for s in 0..size {
        path.push(s);
        on_path[s] = true;
        dfs(s, s, &adj, &mut path, &mut on_path, &mut raw);
        path.pop();
        on_path[s] = false;
    }
    for c in raw {
        out.push(c.into_iter().map(|v| literal(v, n)).collect());
    }
    out
}

/// Simple cycles of length `2t` through both `x` and `¬x` for exactly one
/// variable, with every other variable appearing once. Rotated to start at
/// the positive literal of the repeated variable.
pub fn unicycles(n: usize, arcs: &[(i64, i64)], t: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for c in simple_cycles(n, arcs) {
        if c.len() != 2 * t {
            continue;
        }
        let mut vars: Vec<i64> = c.iter().map(|l| l.abs()).collect();
        vars.sort_unstable();
        let repeated: Vec<i64> = vars.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
        if repeated.len() != 1 {
            continue;
        }
        let x = repeated[0];
        let at = c.iter().position(|&l| l == x).unwrap();
        let mut r = c[at..].to_vec();
        r.extend_from_slice(&c[..at]);
        if r[t] == -x {
            out.push(r);
        }
    }
    out.sort();
    out
}

pub fn dimacs(ls: &[Literal]) -> Vec<i64> {
    ls.iter().map(|l| l.to_dimacs()).collect()
}
