//! Exact satisfiability, model counting and spine variables.

mod dpll;

use serde::{Deserialize, Serialize};

pub use dpll::{Dpll, SearchStats};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, Formula, Literal, Sign};

/// Largest `n` accepted by [`count_models`].
pub const MAX_COUNT_VARS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Sat,
    Unsat,
}

/// Outcome of a decision procedure. A witness is present exactly for SAT.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatResult {
    pub status: Status,
    pub witness: Option<Assignment>,
}

impl SatResult {
    pub fn sat(witness: Assignment) -> SatResult {
        SatResult {
            status: Status::Sat,
            witness: Some(witness),
        }
    }

    pub fn unsat() -> SatResult {
        SatResult {
            status: Status::Unsat,
            witness: None,
        }
    }

    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

pub fn is_satisfiable(formula: &Formula) -> SatResult {
    solve_with_assumptions(formula, &[])
}

/// Satisfiability of `formula` with the given literals forced TRUE.
pub fn solve_with_assumptions(formula: &Formula, assumptions: &[Literal]) -> SatResult {
    match Dpll::new(formula).solve(assumptions) {
        Some(model) => {
            debug_assert!(formula.is_satisfied_by(&model));
            SatResult::sat(model)
        }
        None => SatResult::unsat(),
    }
}

/// Number of satisfying assignments, by exhaustive enumeration.
pub fn count_models(formula: &Formula) -> Result<u64> {
    let n = formula.n();
    if n > MAX_COUNT_VARS {
        return Err(Error::Unsupported(format!(
            "model counting is exhaustive and limited to n ≤ {MAX_COUNT_VARS}, got n = {n}"
        )));
    }
    // Bit v-1 of an assignment word is x_v; a clause is a (pure, negated) mask pair.
    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|c| {
            c.literals().iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u32 << (l.var() - 1);
                if l.is_pure() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let count = (0..1u32 << n)
        .filter(|&sigma| {
            masks
                .iter()
                .all(|&(pos, neg)| sigma & pos != 0 || !sigma & neg != 0)
        })
        .count();
    Ok(count as u64)
}

/// Variables locked to TRUE (`positive`) and to FALSE (`negative`) across all models.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpineReport {
    pub positive: Vec<u32>,
    pub negative: Vec<u32>,
}

impl SpineReport {
    /// `S = |S+| + |S-|`.
    pub fn size(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn locked_value(&self, var: u32) -> Option<Sign> {
        if self.positive.binary_search(&var).is_ok() {
            Some(Sign::Pos)
        } else if self.negative.binary_search(&var).is_ok() {
            Some(Sign::Neg)
        } else {
            None
        }
    }
}

/// Spine variables of a satisfiable formula.
///
/// One model `σ` is found first; each remaining candidate `x` is then tested by
/// forcing `x = -σ_x`. An UNSAT answer locks `x` to `σ_x`; a SAT answer yields a
/// model that rules out every variable on which it differs from `σ`.
pub fn spine_set(formula: &Formula) -> Result<SpineReport> {
    let mut solver = Dpll::new(formula);
    let sigma = solver.solve(&[]).ok_or(Error::NotSatisfiable)?;
    let n = formula.n();
    let mut candidate = vec![true; n];
    let mut report = SpineReport::default();
    for var in 1..=n as u32 {
        if !candidate[var as usize - 1] {
            continue;
        }
        let value = sigma.value(var);
        let flipped = Literal::new(var, -value)?;
        match solver.solve(&[flipped]) {
            None => match value {
                Sign::Pos => report.positive.push(var),
                Sign::Neg => report.negative.push(var),
            },
            Some(tau) => {
                for (c, (a, b)) in candidate
                    .iter_mut()
                    .zip(sigma.values().iter().zip(tau.values()))
                {
                    if a != b {
                        *c = false;
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `true` iff every literal of `clause` contradicts the value its variable is
/// locked to, i.e. `F ∧ C` is unsatisfiable for the `F` that produced `report`.
pub fn blocked_clause_predicate(report: &SpineReport, clause: &Clause) -> bool {
    clause
        .literals()
        .iter()
        .all(|l| report.locked_value(l.var()) == Some(-l.sign()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::make_clause;
    use Sign::{Neg as N, Pos as P};

    fn f2(n: usize, clauses: &[(&[u32], &[Sign])]) -> Formula {
        Formula::from_clauses(
            n,
            clauses[0].0.len(),
            clauses
                .iter()
                .map(|(v, s)| make_clause(n, v, s).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn contradiction() -> Formula {
        f2(
            2,
            &[
                (&[1, 2], &[P, P]),
                (&[1, 2], &[N, P]),
                (&[1, 2], &[P, N]),
                (&[1, 2], &[N, N]),
            ],
        )
    }

    #[test]
    fn four_clause_contradiction_is_unsat() {
        assert_eq!(is_satisfiable(&contradiction()), SatResult::unsat());
        assert_eq!(count_models(&contradiction()), Ok(0));
    }

    #[test]
    fn empty_formula() {
        let f = Formula::new(3, 3);
        let r = is_satisfiable(&f);
        assert!(r.is_sat());
        assert_eq!(r.witness.unwrap().len(), 3);
        assert_eq!(count_models(&f), Ok(8));
        assert_eq!(spine_set(&f), Ok(SpineReport::default()));
    }

    #[test]
    fn count_single_clause() {
        let f = f2(2, &[(&[1, 2], &[P, P])]);
        assert_eq!(count_models(&f), Ok(3));
    }

    #[test]
    fn count_rejects_large_n() {
        assert!(matches!(
            count_models(&Formula::new(25, 3)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn spine_examples() {
        let f = f2(
            2,
            &[(&[1, 2], &[P, P]), (&[1, 2], &[P, N]), (&[1, 2], &[N, P])],
        );
        let r = spine_set(&f).unwrap();
        assert_eq!(r.positive, vec![1, 2]);
        assert!(r.negative.is_empty());
        assert_eq!(r.size(), 2);

        let blocker = make_clause(3, &[1, 2], &[N, N]).unwrap();
        assert!(blocked_clause_predicate(&r, &blocker));
        let mut g = f.clone();
        g.push(blocker).unwrap();
        assert!(!is_satisfiable(&g).is_sat());

        let free = make_clause(3, &[1, 3], &[N, P]).unwrap();
        assert!(!blocked_clause_predicate(&r, &free));

        let f = f2(2, &[(&[1, 2], &[P, P])]);
        assert_eq!(spine_set(&f), Ok(SpineReport::default()));
    }

    #[test]
    fn spine_of_unsat_formula() {
        assert_eq!(spine_set(&contradiction()), Err(Error::NotSatisfiable));
    }

    #[test]
    fn assumptions_force_values() {
        let f = f2(2, &[(&[1, 2], &[P, P])]);
        let r = solve_with_assumptions(&f, &[Literal::neg(1)]);
        assert_eq!(r.witness.unwrap().value(2), P);
        let r = solve_with_assumptions(&f, &[Literal::neg(1), Literal::neg(2)]);
        assert!(!r.is_sat());
    }

    #[test]
    fn negative_spine() {
        // (¬x1 ∨ ¬x2) ∧ (¬x1 ∨ x2) forces x1 = FALSE, leaves x2 free.
        let f = f2(2, &[(&[1, 2], &[N, N]), (&[1, 2], &[N, P])]);
        let r = spine_set(&f).unwrap();
        assert_eq!(r.negative, vec![1]);
        assert!(r.positive.is_empty());
    }
}
