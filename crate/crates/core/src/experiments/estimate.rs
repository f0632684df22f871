use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{clopper_pearson, pooled_standard_error, standard_error};
use super::{check_capacity, trial_seed, SolverChoice, MAX_EXACT_N};
use crate::error::{Error, Result};
use crate::generator::{realize_formula, sample_formula, validate_p, ModelParams, SeededStream};

/// Estimated `Pr(Φ_m ∈ SAT)` at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub m: usize,
    pub trials: usize,
    pub sat_count: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    #[serde(skip)]
    pub seconds: f64,
}

impl EstimateRecord {
    pub(crate) fn from_counts(params: &ModelParams, trials: usize, sat_count: usize, seconds: f64) -> Self {
        let (ci_lo, ci_hi) = clopper_pearson(sat_count, trials, 0.05);
        let p_hat = sat_count as f64 / trials as f64;
        EstimateRecord {
            n: params.n,
            k: params.k,
            p: params.p,
            m: params.m,
            trials,
            sat_count,
            p_hat,
            ci_lo: ci_lo.min(p_hat),
            ci_hi: ci_hi.max(p_hat),
            seconds,
        }
    }

    pub fn standard_error(&self) -> f64 {
        standard_error(self.p_hat, self.trials)
    }
}

/// Fraction of satisfiable formulas over `trials` independent draws, with a
/// 95% Clopper–Pearson interval. Trial `t` uses seed `trial_seed(seed, t)`.
pub fn estimate_sat_probability(
    params: &ModelParams,
    trials: usize,
    seed: u64,
    solver: SolverChoice,
) -> Result<EstimateRecord> {
    estimate_sat_probability_detailed(params, trials, seed, solver).map(|(r, _)| r)
}

/// As [`estimate_sat_probability`], also returning each trial's outcome.
pub fn estimate_sat_probability_detailed(
    params: &ModelParams,
    trials: usize,
    seed: u64,
    solver: SolverChoice,
) -> Result<(EstimateRecord, Vec<bool>)> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let solver = solver.resolve(params.k)?;
    check_capacity(params.n, params.k, solver, MAX_EXACT_N)?;
    let start = Instant::now();
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let f = sample_formula(params, trial_seed(seed, t))?;
            solver.is_sat(&f)
        })
        .collect::<Result<Vec<bool>>>()?;
    let sat = outcomes.iter().filter(|&&s| s).count();
    let record = EstimateRecord::from_counts(params, trials, sat, start.elapsed().as_secs_f64());
    Ok((record, outcomes))
}

/// `P̂(p_a) - P̂(p_b)` for adjacent grid points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseDifference {
    pub p_a: f64,
    pub p_b: f64,
    pub difference: f64,
    pub pooled_se: f64,
    /// Trials satisfiable at `p_a` but not at `p_b`, and vice versa.
    pub discordant: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<EstimateRecord>,
    pub differences: Vec<PairwiseDifference>,
    /// Per trial, satisfiability at each grid point.
    pub outcomes: Vec<Vec<bool>>,
}

impl SweepResult {
    /// Difference between two arbitrary grid points (by index).
    pub fn difference(&self, a: usize, b: usize) -> PairwiseDifference {
        let (ra, rb) = (&self.records[a], &self.records[b]);
        let discordant = self.outcomes.iter().fold((0, 0), |(x, y), o| {
            (x + usize::from(o[a] && !o[b]), y + usize::from(o[b] && !o[a]))
        });
        PairwiseDifference {
            p_a: ra.p,
            p_b: rb.p,
            difference: ra.p_hat - rb.p_hat,
            pooled_se: pooled_standard_error(ra.sat_count, ra.trials, rb.sat_count, rb.trials),
            discordant,
        }
    }
}

/// `P̂(p)` across `p_grid` on common randomness: trial `t` draws one set of
/// clause records and realizes it at every grid polarization.
pub fn monotonicity_sweep(
    n: usize,
    k: usize,
    m: usize,
    p_grid: &[f64],
    trials: usize,
    seed: u64,
    solver: SolverChoice,
) -> Result<SweepResult> {
    if p_grid.is_empty() {
        return Err(Error::Config("empty polarization grid".into()));
    }
    for &p in p_grid {
        validate_p(p)?;
        if p > 0.5 {
            return Err(Error::Config(format!("sweep grid must lie in [0, 1/2], got {p}")));
        }
    }
    if p_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("sweep grid must be sorted".into()));
    }
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    ModelParams::new(n, k, p_grid[0], m)?;
    let solver = solver.resolve(k)?;
    check_capacity(n, k, solver, MAX_EXACT_N)?;

    let start = Instant::now();
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let records = SeededStream::new(trial_seed(seed, t), n, k)?.records(m);
            p_grid
                .iter()
                .map(|&p| solver.is_sat(&realize_formula(n, k, &records, p)))
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<Vec<bool>>>>()?;
    let seconds = start.elapsed().as_secs_f64() / p_grid.len() as f64;

    let records: Vec<EstimateRecord> = p_grid
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let sat = outcomes.iter().filter(|o| o[j]).count();
            EstimateRecord::from_counts(&ModelParams { n, k, p, m }, trials, sat, seconds)
        })
        .collect();
    let mut result = SweepResult {
        records,
        differences: Vec::new(),
        outcomes,
    };
    result.differences = (1..p_grid.len()).map(|j| result.difference(j - 1, j)).collect();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_clauses_always_sat() {
        let params = ModelParams::new(20, 3, 0.3, 0).unwrap();
        let r = estimate_sat_probability(&params, 25, 1, SolverChoice::Auto).unwrap();
        assert_eq!(r.p_hat, 1.0);
        assert_eq!(r.sat_count, 25);
        assert!(r.ci_lo < 1.0 && r.ci_hi == 1.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let params = ModelParams::new(30, 3, 0.2, 128).unwrap();
        let a = estimate_sat_probability_detailed(&params, 40, 5, SolverChoice::Auto).unwrap();
        let b = estimate_sat_probability_detailed(&params, 40, 5, SolverChoice::Auto).unwrap();
        assert_eq!(a.1, b.1);
        assert_eq!(a.0.sat_count, b.0.sat_count);
    }

    #[test]
    fn singleton_sweep() {
        let s = monotonicity_sweep(20, 3, 60, &[0.25], 10, 3, SolverChoice::Auto).unwrap();
        assert_eq!(s.records.len(), 1);
        assert!(s.differences.is_empty());
    }

    #[test]
    fn sweep_validation() {
        assert!(monotonicity_sweep(20, 3, 60, &[], 10, 3, SolverChoice::Auto).is_err());
        assert!(monotonicity_sweep(20, 3, 60, &[0.4, 0.2], 10, 3, SolverChoice::Auto).is_err());
        assert!(monotonicity_sweep(20, 3, 60, &[0.2, 0.7], 10, 3, SolverChoice::Auto).is_err());
        assert!(monotonicity_sweep(500, 3, 60, &[0.2], 10, 3, SolverChoice::Auto).is_err());
    }

    #[test]
    fn sparse_sweep_is_all_sat() {
        let s = monotonicity_sweep(60, 3, 30, &[0.0, 0.25, 0.5], 30, 8, SolverChoice::Auto).unwrap();
        for r in &s.records {
            assert_eq!(r.p_hat, 1.0);
        }
    }
}
