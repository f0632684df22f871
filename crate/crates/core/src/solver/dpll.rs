//! Backtracking search with unit propagation.
//!
//! Two watched literals per clause and chronological backtracking; no clause
//! learning. Branching is driven by occurrence counts in not-yet-satisfied
//! clauses, each weighted by `5^{-free}` so short clauses dominate. The best
//! scoring free variables are then probed: each sign is propagated and undone.
//! A sign whose probe conflicts is refuted outright, so its complement is
//! asserted. Among the rest, the variable whose two probes imply the most
//! literals (two-sided product) is chosen. It is tried first with its
//! majority sign, and ties go to the lowest index.

use crate::formula::{Assignment, Formula, Literal, Sign};

const UNASSIGNED: i8 = 0;
/// Free variables probed per node: the top `1/LOOKAHEAD_FRACTION` by score,
/// but at least `MIN_LOOKAHEAD`.
const LOOKAHEAD_FRACTION: usize = 5;
const MIN_LOOKAHEAD: usize = 10;
/// Weight of an unsatisfied clause with `j` free literals, `5^{-j}`.
const WEIGHTS: [f64; 8] = [1.0, 0.2, 0.04, 0.008, 0.0016, 0.00032, 0.000064, 0.0000128];

enum Step {
    Satisfied,
    Conflict,
    Branch(u32),
}

#[inline]
fn two_sided(a: f64, b: f64) -> f64 {
    1024.0 * a * b + a + b
}

/// Counters from the last call to [`Dpll::solve`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
}

#[derive(Clone, Copy, Debug)]
struct Decision {
    trail_len: usize,
    lit: u32,
    flipped: bool,
}

/// Reusable solver over a fixed clause set.
#[derive(Clone, Debug)]
pub struct Dpll {
    n: usize,
    /// Clause literals (dense codes), positions 0 and 1 watched.
    lits: Vec<u32>,
    starts: Vec<usize>,
    watches: Vec<Vec<u32>>,
    units: Vec<u32>,
    /// Per literal code: 1 true, -1 false, 0 unassigned.
    values: Vec<i8>,
    trail: Vec<u32>,
    qhead: usize,
    decisions: Vec<Decision>,
    scores: Vec<f64>,
    /// Preferred first value per variable, overriding the majority sign.
    phase: Option<Vec<bool>>,
    stats: SearchStats,
}

#[inline]
fn neg(code: u32) -> u32 {
    code ^ 1
}

impl Dpll {
    pub fn new(formula: &Formula) -> Dpll {
        let n = formula.n();
        let mut lits = Vec::with_capacity(formula.m() * formula.k());
        let mut starts = Vec::with_capacity(formula.m() + 1);
        let mut watches = vec![Vec::new(); 2 * n];
        let mut units = Vec::new();
        for clause in formula.clauses() {
            let cid = starts.len() as u32;
            starts.push(lits.len());
            lits.extend(clause.literals().iter().map(|l| l.code() as u32));
            match clause.width() {
                1 => units.push(clause.literals()[0].code() as u32),
                _ => {
                    watches[clause.literals()[0].code()].push(cid);
                    watches[clause.literals()[1].code()].push(cid);
                }
            }
        }
        starts.push(lits.len());
        Dpll {
            n,
            lits,
            starts,
            watches,
            units,
            values: vec![UNASSIGNED; 2 * n],
            trail: Vec::with_capacity(n),
            qhead: 0,
            decisions: Vec::new(),
            scores: vec![0.0; 2 * n],
            phase: None,
            stats: SearchStats::default(),
        }
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    #[inline]
    fn lit_value(&self, code: u32) -> i8 {
        self.values[code as usize]
    }

    #[inline]
    fn is_free(&self, var: usize) -> bool {
        self.values[2 * var] == UNASSIGNED
    }

    #[inline]
    fn assign(&mut self, code: u32) {
        self.values[code as usize] = 1;
        self.values[neg(code) as usize] = -1;
        self.trail.push(code);
    }

    fn undo_to(&mut self, len: usize) {
        for &code in &self.trail[len..] {
            self.values[code as usize] = UNASSIGNED;
            self.values[neg(code) as usize] = UNASSIGNED;
        }
        self.trail.truncate(len);
        self.qhead = len;
    }

    /// Enqueues `code` as true; `false` on an immediate contradiction.
    fn enqueue(&mut self, code: u32) -> bool {
        match self.lit_value(code) {
            1 => true,
            -1 => false,
            _ => {
                self.assign(code);
                true
            }
        }
    }

    /// Runs unit propagation to fixpoint; `false` on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = neg(self.trail[self.qhead]);
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified as usize]);
            let mut i = 0;
            let mut conflict = false;
            'clauses: while i < ws.len() {
                let cid = ws[i] as usize;
                let (s, e) = (self.starts[cid], self.starts[cid + 1]);
                if self.lits[s] == falsified {
                    self.lits.swap(s, s + 1);
                }
                let other = self.lits[s];
                if self.lit_value(other) == 1 {
                    i += 1;
                    continue;
                }
                for j in s + 2..e {
                    let cand = self.lits[j];
                    if self.lit_value(cand) != -1 {
                        self.lits.swap(s + 1, j);
                        self.watches[cand as usize].push(cid as u32);
                        ws.swap_remove(i);
                        continue 'clauses;
                    }
                }
                if self.lit_value(other) == -1 {
                    conflict = true;
                    break;
                }
                self.assign(other);
                self.stats.propagations += 1;
                i += 1;
            }
            self.watches[falsified as usize] = ws;
            if conflict {
                return false;
            }
        }
        true
    }

    /// Fills `scores` with clause-length weighted occurrence counts over the
    /// unsatisfied clauses; `false` when every clause is satisfied.
    fn score_literals(&mut self) -> bool {
        self.scores.iter_mut().for_each(|s| *s = 0.0);
        let mut any = false;
        for cid in 0..self.starts.len() - 1 {
            let clause = &self.lits[self.starts[cid]..self.starts[cid + 1]];
            if clause.iter().any(|&c| self.lit_value(c) == 1) {
                continue;
            }
            let free = clause
                .iter()
                .filter(|&&c| self.values[c as usize] == UNASSIGNED)
                .count();
            let w = WEIGHTS[free.min(WEIGHTS.len() - 1)];
            for &c in clause {
                if self.values[c as usize] == UNASSIGNED {
                    self.scores[c as usize] += w;
                    any = true;
                }
            }
        }
        any
    }

    /// Propagates `code` on top of the current trail and undoes it again.
    /// Returns the number of implied assignments, or `None` on conflict.
    fn probe(&mut self, code: u32) -> Option<usize> {
        let len = self.trail.len();
        self.assign(code);
        let ok = self.propagate();
        let gained = self.trail.len() - len;
        self.undo_to(len);
        ok.then_some(gained)
    }

    fn lookahead(&mut self) -> Step {
        loop {
            if !self.score_literals() {
                return Step::Satisfied;
            }
            let mut ranked: Vec<(f64, u32)> = (0..self.n)
                .filter(|&v| self.is_free(v))
                .map(|v| (two_sided(self.scores[2 * v], self.scores[2 * v + 1]), v as u32))
                .collect();
            let candidates = (ranked.len() / LOOKAHEAD_FRACTION).max(MIN_LOOKAHEAD);
            // highest score first, lowest index on ties
            let order = |a: &(f64, u32), b: &(f64, u32)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
            if ranked.len() > candidates {
                ranked.select_nth_unstable_by(candidates, order);
                ranked.truncate(candidates);
            }
            ranked.sort_unstable_by(order);

            let mut best: Option<(f64, u32)> = None;
            for &(_, var) in &ranked {
                if !self.is_free(var as usize) {
                    continue;
                }
                let pos = 2 * var;
                let up = self.probe(pos);
                let down = self.probe(pos + 1);
                match (up, down) {
                    (None, None) => return Step::Conflict,
                    (Some(a), Some(b)) => {
                        let score = two_sided(a as f64 + 1.0, b as f64 + 1.0);
                        if best.is_none_or(|(s, _)| score > s) {
                            best = Some((score, var));
                        }
                    }
                    // a failed literal: its complement is implied
                    _ => {
                        self.assign(if up.is_none() { pos + 1 } else { pos });
                        if !self.propagate() {
                            return Step::Conflict;
                        }
                    }
                }
            }
            // forced literals may have assigned an earlier pick
            if let Some((_, var)) = best.filter(|&(_, v)| self.is_free(v as usize)) {
                let pos = 2 * var;
                let first = match &self.phase {
                    Some(phase) => pos + u32::from(!phase[var as usize]),
                    None if self.scores[pos as usize] >= self.scores[pos as usize + 1] => pos,
                    None => pos + 1,
                };
                return Step::Branch(first);
            }
        }
    }

    /// Decides satisfiability under `assumptions`, returning a model on success.
    ///
    /// Unassigned variables in the returned model are set to FALSE.
    pub fn solve(&mut self, assumptions: &[Literal]) -> Option<Assignment> {
        self.phase = None;
        self.search(assumptions)
    }

    /// As [`Dpll::solve`], but each branch first tries the value `hint` gives
    /// the branching variable. A hint close to a model makes satisfiable
    /// instances cheap; the verdict is the same.
    pub fn solve_with_hint(&mut self, assumptions: &[Literal], hint: &Assignment) -> Option<Assignment> {
        assert_eq!(hint.len(), self.n, "hint covers every variable");
        self.phase = Some((1..=self.n as u32).map(|v| hint.value(v).is_pos()).collect());
        let found = self.search(assumptions);
        self.phase = None;
        found
    }

    fn search(&mut self, assumptions: &[Literal]) -> Option<Assignment> {
        self.stats = SearchStats::default();
        self.undo_to(0);
        self.decisions.clear();

        let roots: Vec<u32> = self
            .units
            .iter()
            .copied()
            .chain(assumptions.iter().map(|l| l.code() as u32))
            .collect();
        for code in roots {
            if !self.enqueue(code) {
                return None;
            }
        }

        loop {
            let step = if self.propagate() {
                self.lookahead()
            } else {
                Step::Conflict
            };
            match step {
                Step::Satisfied => return Some(self.model()),
                Step::Conflict => {
                    self.stats.conflicts += 1;
                    if !self.backtrack() {
                        return None;
                    }
                }
                Step::Branch(lit) => {
                    self.stats.decisions += 1;
                    self.decisions.push(Decision {
                        trail_len: self.trail.len(),
                        lit,
                        flipped: false,
                    });
                    self.assign(lit);
                }
            }
        }
    }

    /// Flips the deepest decision not yet flipped; `false` when none is left.
    fn backtrack(&mut self) -> bool {
        while let Some(d) = self.decisions.pop() {
            self.undo_to(d.trail_len);
            if !d.flipped {
                self.decisions.push(Decision {
                    trail_len: d.trail_len,
                    lit: neg(d.lit),
                    flipped: true,
                });
                self.assign(neg(d.lit));
                return true;
            }
        }
        false
    }

    fn model(&self) -> Assignment {
        Assignment::new(
            (0..self.n)
                .map(|v| Sign::from_bool(self.values[2 * v] == 1))
                .collect(),
        )
    }
}
