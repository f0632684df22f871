use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_capacity, trial_seed, SolverChoice, MAX_SPINE_N};
use crate::error::{Error, Result};
use crate::generator::{realize_formula, sample_formula, ModelParams, SeededStream};
use crate::solver::{is_satisfiable, spine_set};

/// Moments of the spine count `S` over the satisfiable trials at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpineMomentRecord {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub m: usize,
    pub trials: usize,
    pub sat_trials: usize,
    pub mean_s: f64,
    /// Mean of `S^{k-1}`.
    pub mean_s_pow_k_minus_1: f64,
    /// `M̂`, the mean of `S^k`.
    pub m_hat: f64,
    #[serde(skip)]
    pub seconds: f64,
}

impl SpineMomentRecord {
    fn from_sizes(params: &ModelParams, sizes: &[Option<usize>], seconds: f64) -> Result<Self> {
        let sat: Vec<f64> = sizes.iter().flatten().map(|&s| s as f64).collect();
        if sat.is_empty() {
            return Err(Error::EmptyConditioning);
        }
        let k = params.k as i32;
        let mean = |f: &dyn Fn(f64) -> f64| sat.iter().map(|&s| f(s)).sum::<f64>() / sat.len() as f64;
        Ok(SpineMomentRecord {
            n: params.n,
            k: params.k,
            p: params.p,
            m: params.m,
            trials: sizes.len(),
            sat_trials: sat.len(),
            mean_s: mean(&|s| s),
            mean_s_pow_k_minus_1: mean(&|s| s.powi(k - 1)),
            m_hat: mean(&|s| s.powi(k)),
            seconds,
        })
    }
}

/// Spine statistics of `Φ_m(n, k, p)`, conditioned on satisfiability.
pub fn spine_moment(params: &ModelParams, trials: usize, seed: u64) -> Result<SpineMomentRecord> {
    spine_moment_detailed(params, trials, seed).map(|(r, _)| r)
}

/// As [`spine_moment`], also returning each trial's spine count (`None` when UNSAT).
pub fn spine_moment_detailed(
    params: &ModelParams,
    trials: usize,
    seed: u64,
) -> Result<(SpineMomentRecord, Vec<Option<usize>>)> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    check_capacity(params.n, params.k, SolverChoice::Exact, MAX_SPINE_N)?;
    let start = Instant::now();
    let sizes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let f = sample_formula(params, trial_seed(seed, t))?;
            match spine_set(&f) {
                Ok(r) => Ok(Some(r.size())),
                Err(Error::NotSatisfiable) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let record = SpineMomentRecord::from_sizes(params, &sizes, start.elapsed().as_secs_f64())?;
    Ok((record, sizes))
}

/// One row of the derivative diagnostic at `b = 1/2 - p`.
///
/// `slope` is the finite difference of `P̂_m` to the next grid point (absent on
/// the last row); `rhs` is `2k³ P̂_{m-1} m n^{-k} M̂^{(k-1)/k}` with `M̂` the
/// `S^k` moment of `Φ_{m-1}`. Nothing is asserted about the two columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub b: f64,
    pub p_hat_m: f64,
    pub p_hat_m_minus_1: f64,
    pub m_hat: Option<f64>,
    pub slope: Option<f64>,
    pub rhs: Option<f64>,
}

pub fn derivative_diagnostic(
    n: usize,
    k: usize,
    m: usize,
    b_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<DiagnosticRow>> {
    if b_grid.is_empty() || m == 0 || trials == 0 {
        return Err(Error::Config("need a non-empty b grid, m ≥ 1 and trials ≥ 1".into()));
    }
    if b_grid.iter().any(|b| !(0.0..=0.5).contains(b)) {
        return Err(Error::Config("b grid must lie in [0, 1/2]".into()));
    }
    ModelParams::new(n, k, 0.5, m)?;
    check_capacity(n, k, SolverChoice::Exact, MAX_SPINE_N)?;

    // per trial, per b: (Φ_m SAT, spine count of Φ_{m-1} when SAT)
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let records = SeededStream::new(trial_seed(seed, t), n, k)?.records(m);
            b_grid
                .iter()
                .map(|&b| {
                    let f = realize_formula(n, k, &records, 0.5 - b);
                    let sat_m = is_satisfiable(&f).is_sat();
                    let spines = match spine_set(&f.prefix(m - 1)) {
                        Ok(r) => Some(r.size()),
                        Err(Error::NotSatisfiable) => None,
                        Err(e) => return Err(e),
                    };
                    Ok((sat_m, spines))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let t = trials as f64;
    let kf = k as f64;
    let mut rows: Vec<DiagnosticRow> = b_grid
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let p_hat_m = per_trial.iter().filter(|r| r[j].0).count() as f64 / t;
            let sizes: Vec<f64> = per_trial.iter().filter_map(|r| r[j].1).map(|s| s as f64).collect();
            let p_hat_m_minus_1 = sizes.len() as f64 / t;
            let m_hat = (!sizes.is_empty())
                .then(|| sizes.iter().map(|s| s.powf(kf)).sum::<f64>() / sizes.len() as f64);
            let rhs = m_hat.map(|mh| {
                2.0 * kf.powi(3) * p_hat_m_minus_1 * m as f64 * (n as f64).powf(-kf)
                    * mh.powf((kf - 1.0) / kf)
            });
            DiagnosticRow {
                b,
                p_hat_m,
                p_hat_m_minus_1,
                m_hat,
                slope: None,
                rhs,
            }
        })
        .collect();
    for j in 0..rows.len().saturating_sub(1) {
        let db = rows[j + 1].b - rows[j].b;
        if db != 0.0 {
            rows[j].slope = Some((rows[j + 1].p_hat_m - rows[j].p_hat_m) / db);
        }
    }
    Ok(rows)
}
