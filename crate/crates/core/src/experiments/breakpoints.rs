use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::median;
use super::{check_capacity, trial_seed, SolverChoice, MAX_EXACT_N};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};
use crate::generator::{validate_p, validate_shape, SeededStream};

/// Per-trial breakpoints `m* = min{m : Φ_m UNSAT}` and their median density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakpointRecord {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub trials: usize,
    pub breakpoints: Vec<usize>,
    /// Median of `m*/n`, the estimate of the median threshold density.
    pub median_density: f64,
    #[serde(skip)]
    pub seconds: f64,
}

/// Nested formulas along one seeded clause stream.
struct NestedStream {
    stream: SeededStream,
    p: f64,
    formula: Formula,
}

impl NestedStream {
    fn ensure(&mut self, m: usize) {
        while self.formula.m() < m {
            let i = self.formula.m() as u64 + 1;
            let clause = self.stream.record(i).realize(self.p);
            self.formula.push(clause).expect("stream matches (n, k)");
        }
    }

    fn prefix(&mut self, m: usize) -> Formula {
        self.ensure(m);
        self.formula.prefix(m)
    }

    /// Largest `m` in `from..=to` such that `model` satisfies `Φ_m`, given
    /// that it satisfies `Φ_from`.
    fn satisfied_prefix(&mut self, model: &Assignment, from: usize, to: usize) -> usize {
        let mut m = from;
        while m < to {
            self.ensure(m + 1);
            let clause = &self.formula.clauses()[m];
            if !clause.literals().iter().any(|&l| l.eval(model).is_pos()) {
                break;
            }
            m += 1;
        }
        m
    }
}

/// Locates `m*` for one clause stream.
///
/// Satisfiability is monotone along the nested stream. The exact solver walks
/// up the stream keeping a model: clauses the model satisfies are skipped, and
/// at the first clause it violates the prefix is solved again, branching
/// towards the old model. This proves UNSAT exactly once, at `m*` itself;
/// proofs just above the threshold are as hard as at it, so bisection would
/// pay for several. The linear-time 2-SAT solver instead doubles `m` from
/// `n/2` and bisects, which needs far fewer solves.
pub fn trial_breakpoint(n: usize, k: usize, p: f64, seed: u64, solver: SolverChoice) -> Result<usize> {
    validate_shape(n, k)?;
    validate_p(p)?;
    let solver = solver.resolve(k)?;
    let mut nested = NestedStream {
        stream: SeededStream::new(seed, n, k)?,
        p,
        formula: Formula::new(n, k),
    };
    let model = Assignment::all(n, crate::formula::Sign::Neg);
    let (m_star, model) = match solver {
        SolverChoice::TwoSat => bisect(&mut nested, solver, model)?,
        _ => walk(&mut nested, solver, model)?,
    };
    if !nested.prefix(m_star - 1).is_satisfied_by(&model) {
        return Err(Error::Unsupported(format!(
            "breakpoint {m_star} failed re-verification"
        )));
    }
    Ok(m_star)
}

fn walk(nested: &mut NestedStream, solver: SolverChoice, mut model: Assignment) -> Result<(usize, Assignment)> {
    let mut lo = 0;
    loop {
        lo = nested.satisfied_prefix(&model, lo, usize::MAX);
        let m = lo + 1;
        match solver.sat_witness_near(&nested.prefix(m), &model)? {
            Some(found) => {
                lo = m;
                model = found;
            }
            None => return Ok((m, model)),
        }
    }
}

fn bisect(nested: &mut NestedStream, solver: SolverChoice, mut model: Assignment) -> Result<(usize, Assignment)> {
    let mut lo = 0;
    let mut hi = (nested.formula.n() / 2).max(1);
    let mut hi_unsat = false;
    loop {
        lo = nested.satisfied_prefix(&model, lo, hi);
        let m = if hi_unsat {
            if hi - lo == 1 {
                return Ok((hi, model));
            }
            lo + (hi - lo) / 2
        } else if lo == hi {
            hi = hi.checked_mul(2).ok_or_else(|| {
                Error::Unsupported("clause stream never became unsatisfiable".into())
            })?;
            continue;
        } else {
            hi
        };
        match solver.sat_witness(&nested.prefix(m))? {
            Some(found) => {
                lo = m;
                model = found;
            }
            None => {
                hi = m;
                hi_unsat = true;
            }
        }
    }
}

/// Breakpoints for `trials` independent streams; trial `t` uses `trial_seed(seed, t)`.
pub fn estimate_breakpoints(
    n: usize,
    k: usize,
    p: f64,
    trials: usize,
    seed: u64,
    solver: SolverChoice,
) -> Result<BreakpointRecord> {
    validate_shape(n, k)?;
    validate_p(p)?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    check_capacity(n, k, solver, MAX_EXACT_N)?;
    let start = Instant::now();
    let breakpoints = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_breakpoint(n, k, p, trial_seed(seed, t), solver))
        .collect::<Result<Vec<usize>>>()?;
    let densities: Vec<f64> = breakpoints.iter().map(|&m| m as f64 / n as f64).collect();
    Ok(BreakpointRecord {
        n,
        k,
        p,
        trials,
        median_density: median(&densities),
        breakpoints,
        seconds: start.elapsed().as_secs_f64(),
    })
}
