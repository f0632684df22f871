//! Monte Carlo experiments over the polarized model.
//!
//! Every trial draws its formula from a seed that is a pure function of the
//! master seed, the point index and the trial index. Trials run on the
//! current rayon pool and are collected by index, so results do not depend on
//! the number of workers.

mod breakpoints;
mod estimate;
mod plan;
mod spines;
pub mod stats;

use serde::{Deserialize, Serialize};

pub use breakpoints::{estimate_breakpoints, trial_breakpoint, BreakpointRecord};
pub use estimate::{
    estimate_sat_probability, estimate_sat_probability_detailed, monotonicity_sweep,
    EstimateRecord, PairwiseDifference, SweepResult,
};
pub use plan::{csv_header, run_plan, PlanKind, PointRecord, ResultsBody, RunOptions, RunOutput, TrialPlan};
pub use spines::{
    derivative_diagnostic, spine_moment, spine_moment_detailed, DiagnosticRow, SpineMomentRecord,
};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};
use crate::solver::{is_satisfiable, Dpll, SatResult};
use crate::twosat::solve_2sat;

/// Largest `n` for probability and threshold estimation with `k ≥ 3`.
pub const MAX_EXACT_N: usize = 400;
/// Largest `n` for spine moments with `k ≥ 3`.
pub const MAX_SPINE_N: usize = 200;

/// Which decision procedure to run on each trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    /// `two_sat` for `k = 2`, `exact` otherwise.
    #[default]
    Auto,
    TwoSat,
    Exact,
}

impl SolverChoice {
    pub fn resolve(self, k: usize) -> Result<SolverChoice> {
        match (self, k) {
            (SolverChoice::Auto, 2) => Ok(SolverChoice::TwoSat),
            (SolverChoice::Auto, _) => Ok(SolverChoice::Exact),
            (SolverChoice::TwoSat, k) if k != 2 => Err(Error::Config(format!(
                "the 2-SAT solver needs k = 2, got k = {k}"
            ))),
            (s, _) => Ok(s),
        }
    }

    pub fn solve(self, formula: &Formula) -> Result<SatResult> {
        // an empty formula has width 0 and any solver decides it
        let k = if formula.is_empty() { 2 } else { formula.k() };
        match self.resolve(k)? {
            SolverChoice::TwoSat => solve_2sat(formula),
            _ => Ok(is_satisfiable(formula)),
        }
    }

    pub fn is_sat(self, formula: &Formula) -> Result<bool> {
        Ok(self.solve(formula)?.is_sat())
    }

    pub(crate) fn sat_witness(self, formula: &Formula) -> Result<Option<Assignment>> {
        Ok(self.solve(formula)?.witness)
    }

    /// As `sat_witness`, letting the exact solver branch towards `hint` first.
    pub(crate) fn sat_witness_near(self, formula: &Formula, hint: &Assignment) -> Result<Option<Assignment>> {
        match self.resolve(formula.k())? {
            SolverChoice::TwoSat => self.sat_witness(formula),
            _ => Ok(Dpll::new(formula).solve_with_hint(&[], hint)),
        }
    }
}

/// Rejects `(k ≥ 3, n > limit)` for the exact solver.
pub(crate) fn check_capacity(n: usize, k: usize, solver: SolverChoice, limit: usize) -> Result<()> {
    if k >= 3 && n > limit && solver.resolve(k)? == SolverChoice::Exact {
        return Err(Error::Unsupported(format!(
            "exact solving with k = {k} is limited to n ≤ {limit}, got n = {n}"
        )));
    }
    Ok(())
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one grid point, derived from the master seed.
pub fn point_seed(master: u64, point: u64) -> u64 {
    mix64(mix64(master ^ 0x5053_4154_504f_494e).wrapping_add(point.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Seed for one trial at a point.
pub fn trial_seed(point_seed: u64, trial: u64) -> u64 {
    mix64(mix64(point_seed ^ 0x5452_4941_4c53_4545).wrapping_add(trial.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}
