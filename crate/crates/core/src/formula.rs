//! Literals, clauses, CNF formulas and truth assignments.
//!
//! Truth values are encoded as signs: `+1` is TRUE and `-1` is FALSE. A
//! literal carries the sign of its occurrence (`+1` for `x`, `-1` for `¬x`),
//! so a literal is satisfied by an assignment exactly when the two signs agree.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A value in `{+1, -1}`, used both for truth values and literal signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub const TRUE: Sign = Sign::Pos;
    pub const FALSE: Sign = Sign::Neg;

    pub fn from_bool(b: bool) -> Sign {
        if b {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn is_pos(self) -> bool {
        self == Sign::Pos
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.as_i8()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Sign, String> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

/// A literal on a 1-based variable index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    sign: Sign,
}

impl Literal {
    /// Creates a literal. `var` must be at least 1.
    pub fn new(var: u32, sign: Sign) -> Result<Literal> {
        if var == 0 {
            return Err(Error::BadIndex { index: 0, n: 0 });
        }
        Ok(Literal { var, sign })
    }

    pub fn pos(var: u32) -> Literal {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, sign: Sign::Pos }
    }

    pub fn neg(var: u32) -> Literal {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, sign: Sign::Neg }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    /// `true` for a pure (unnegated) occurrence.
    pub fn is_pure(self) -> bool {
        self.sign.is_pos()
    }

    pub fn negated(self) -> Literal {
        Literal {
            var: self.var,
            sign: -self.sign,
        }
    }

    /// Signed DIMACS integer.
    pub fn to_dimacs(self) -> i64 {
        i64::from(self.var) * i64::from(self.sign.as_i8())
    }

    /// Dense index in `0..2n`: `2(v-1)` for `x_v`, `2(v-1)+1` for `¬x_v`.
    pub fn code(self) -> usize {
        2 * (self.var as usize - 1) + usize::from(!self.sign.is_pos())
    }

    pub fn from_code(code: usize) -> Literal {
        Literal {
            var: (code / 2 + 1) as u32,
            sign: Sign::from_bool(code.is_multiple_of(2)),
        }
    }

    pub fn eval(self, assignment: &Assignment) -> Sign {
        Sign::from_bool(assignment.value(self.var) == self.sign)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign.is_pos() {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "¬x{}", self.var)
        }
    }
}

/// A disjunction of literals on pairwise distinct variables, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause from literals, rejecting empty clauses and repeated variables.
    pub fn from_literals(literals: Vec<Literal>) -> Result<Clause> {
        if literals.is_empty() {
            return Err(Error::EmptyClause);
        }
        for (j, a) in literals.iter().enumerate() {
            if a.var == 0 {
                return Err(Error::BadIndex { index: 0, n: 0 });
            }
            if literals[..j].iter().any(|b| b.var == a.var) {
                return Err(Error::DuplicateVariable(a.var));
            }
        }
        Ok(Clause { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn max_var(&self) -> u32 {
        self.literals.iter().map(|l| l.var).max().unwrap_or(0)
    }

    /// `+1` iff some literal agrees with the assignment.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Sign> {
        let n = assignment.len();
        if let Some(l) = self.literals.iter().find(|l| l.var as usize > n) {
            return Err(Error::BadAssignment {
                expected: l.var as usize,
                got: n,
            });
        }
        Ok(Sign::from_bool(
            self.literals.iter().any(|&l| l.eval(assignment).is_pos()),
        ))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, l) in self.literals.iter().enumerate() {
            if j > 0 {
                write!(f, " ∨ ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Validated clause constructor from parallel variable and sign lists.
pub fn make_clause(n: usize, variables: &[u32], signs: &[Sign]) -> Result<Clause> {
    if variables.len() != signs.len() {
        return Err(Error::BadParams(format!(
            "{} variables but {} signs",
            variables.len(),
            signs.len()
        )));
    }
    if let Some(&v) = variables.iter().find(|&&v| v == 0 || v as usize > n) {
        return Err(Error::BadIndex { index: v, n });
    }
    Clause::from_literals(
        variables
            .iter()
            .zip(signs)
            .map(|(&var, &sign)| Literal { var, sign })
            .collect(),
    )
}

/// A k-CNF on `n` variables.
///
/// A width of 0 is only possible for an empty formula whose width is unknown
/// (e.g. `p cnf 3 0` read without a width hint).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    k: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n: usize, k: usize) -> Formula {
        Formula {
            n,
            k,
            clauses: Vec::new(),
        }
    }

    pub fn from_clauses(n: usize, k: usize, clauses: Vec<Clause>) -> Result<Formula> {
        let mut f = Formula::with_capacity(n, k, clauses.len());
        for c in clauses {
            f.push(c)?;
        }
        Ok(f)
    }

    pub(crate) fn with_capacity(n: usize, k: usize, m: usize) -> Formula {
        Formula {
            n,
            k,
            clauses: Vec::with_capacity(m),
        }
    }

    /// Appends a clause, checking width and variable range.
    pub fn push(&mut self, clause: Clause) -> Result<()> {
        if clause.width() != self.k {
            return Err(Error::BadWidth {
                expected: self.k,
                got: clause.width(),
            });
        }
        let v = clause.max_var();
        if v as usize > self.n {
            return Err(Error::BadIndex { index: v, n: self.n });
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// The formula made of the first `m` clauses.
    pub fn prefix(&self, m: usize) -> Formula {
        Formula {
            n: self.n,
            k: self.k,
            clauses: self.clauses[..m.min(self.clauses.len())].to_vec(),
        }
    }

    /// `+1` iff every clause evaluates to `+1`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Sign> {
        if assignment.len() != self.n {
            return Err(Error::BadAssignment {
                expected: self.n,
                got: assignment.len(),
            });
        }
        Ok(Sign::from_bool(self.clauses.iter().all(|c| {
            c.literals.iter().any(|&l| l.eval(assignment).is_pos())
        })))
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        matches!(self.evaluate(assignment), Ok(Sign::Pos))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A truth vector `σ ∈ {±1}^n`, indexed by 1-based variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    values: Vec<Sign>,
}

impl Assignment {
    pub fn new(values: Vec<Sign>) -> Assignment {
        Assignment { values }
    }

    pub fn all(n: usize, value: Sign) -> Assignment {
        Assignment {
            values: vec![value; n],
        }
    }

    /// Bit `v-1` of `bits` is the value of `x_v` (set = TRUE).
    pub fn from_bits(n: usize, bits: u64) -> Assignment {
        Assignment {
            values: (0..n).map(|i| Sign::from_bool(bits >> i & 1 == 1)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of variable `var` (1-based).
    pub fn value(&self, var: u32) -> Sign {
        self.values[var as usize - 1]
    }

    pub fn set(&mut self, var: u32, value: Sign) {
        self.values[var as usize - 1] = value;
    }

    pub fn values(&self) -> &[Sign] {
        &self.values
    }

    /// Number of coordinates set to TRUE.
    pub fn count_true(&self) -> usize {
        self.values.iter().filter(|s| s.is_pos()).count()
    }
}
