//! Closed-form bounds for the polarized model.
//!
//! Clause-violation probabilities are computed for the with-replacement clause
//! model, where they have a closed form; the gap to the generator's
//! without-replacement model is at most `k²/n` and is reported separately.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `1 / (-log₂(1 - 2^{-k}))`, the first-moment upper bound on the threshold density.
pub fn upper_density(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::BadParams(format!("k={k} must be at least 2")));
    }
    let clause_sat = 1.0 - (-(k as f64)).exp2();
    Ok(-1.0 / clause_sat.log2())
}

/// Violation statistics for an assignment with `i` TRUE coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationProfile {
    pub i: usize,
    /// Fraction of TRUE coordinates `θ = i/n`.
    pub theta: f64,
    /// Probability that one literal of a `B = +1` clause is falsified:
    /// `ρ = p(1-θ) + (1-p)θ`.
    pub rho: f64,
    /// `q̃ = ½(ρ^k + (1-ρ)^k)`: probability that a with-replacement clause is violated.
    pub q_tilde: f64,
    /// `k²/n`, the largest possible gap to the without-replacement probability.
    pub replacement_slack: f64,
}

pub fn violation_probability(i: usize, n: usize, k: usize, p: f64) -> Result<ViolationProfile> {
    if i > n || n == 0 {
        return Err(Error::BadParams(format!("need 0 ≤ i ≤ n, n > 0 (i={i}, n={n})")));
    }
    let theta = i as f64 / n as f64;
    let rho = p * (1.0 - theta) + (1.0 - p) * theta;
    let q_tilde = 0.5 * (rho.powi(k as i32) + (1.0 - rho).powi(k as i32));
    Ok(ViolationProfile {
        i,
        theta,
        rho,
        q_tilde,
        replacement_slack: (k * k) as f64 / n as f64,
    })
}

/// Exact violation probability `q_i` for the generator's clause model
/// (ordered distinct k-tuples), by enumerating every tuple. The assignment sets
/// variables `1..=i` TRUE; by symmetry `q_i` does not depend on which ones.
pub fn exact_violation_probability(i: usize, n: usize, k: usize, p: f64) -> Result<f64> {
    if i > n || k > n || k == 0 {
        return Err(Error::BadParams(format!("need 0 ≤ i ≤ n and 1 ≤ k ≤ n (i={i}, n={n}, k={k})")));
    }
    let tuples: f64 = (0..k).map(|j| (n - j) as f64).product();
    if tuples > 5e7 {
        return Err(Error::Unsupported(format!(
            "enumerating {tuples} ordered tuples is too many"
        )));
    }
    // Only the count of TRUE variables in the tuple matters: under coin B the
    // slot on a TRUE variable is falsified w.p. (1-p) for B=+1 and p for B=-1.
    let mut total = 0.0;
    let mut tuple = Vec::with_capacity(k);
    visit_tuples(n, k, &mut tuple, &mut |t| {
        let trues = t.iter().filter(|&&v| v < i).count() as i32;
        let falses = k as i32 - trues;
        let pos_coin = (1.0 - p).powi(trues) * p.powi(falses);
        let neg_coin = p.powi(trues) * (1.0 - p).powi(falses);
        total += 0.5 * (pos_coin + neg_coin);
    });
    Ok(total / tuples)
}

fn visit_tuples(n: usize, k: usize, tuple: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if tuple.len() == k {
        f(tuple);
        return;
    }
    for v in 0..n {
        if !tuple.contains(&v) {
            tuple.push(v);
            visit_tuples(n, k, tuple, f);
            tuple.pop();
        }
    }
}

fn ln_binomial(n: usize, i: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((n - i) as f64 + 1.0)
}

/// `log₂ Σ_{i=0}^{n} C(n,i) (1 - q̃_i)^m`, the log expected number of models
/// under the with-replacement clause model.
pub fn log2_expected_models(n: usize, k: usize, p: f64, m: usize) -> Result<f64> {
    log2_expected_models_with(n, k, p, m, 0.0)
}

/// As [`log2_expected_models`] but with each violation probability lowered by
/// the replacement slack `k²/n`, giving an upper bound on the expected model
/// count of the generator's formulas.
pub fn log2_expected_models_with_slack(n: usize, k: usize, p: f64, m: usize) -> Result<f64> {
    log2_expected_models_with(n, k, p, m, (k * k) as f64 / n as f64)
}

fn log2_expected_models_with(n: usize, k: usize, p: f64, m: usize, slack: f64) -> Result<f64> {
    if n == 0 || k < 1 || !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParams(format!("n={n}, k={k}, p={p}")));
    }
    if m == 0 {
        return Ok(n as f64);
    }
    let terms: Vec<f64> = (0..=n)
        .map(|i| {
            let q = violation_probability(i, n, k, p)?.q_tilde;
            let keep = (1.0 - q + slack).min(1.0);
            Ok(ln_binomial(n, i) + m as f64 * keep.ln())
        })
        .collect::<Result<_>>()?;
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    Ok((peak + sum.ln()) / std::f64::consts::LN_2)
}

/// The pretzel-existence bound `30/(nε³)` with `ε = 1 - m/n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PretzelBound {
    pub epsilon: f64,
    /// Unclamped `30/(nε³)`.
    pub raw: f64,
    /// `min(raw, 1)`.
    pub clamped: f64,
}

pub fn pretzel_probability_bound(n: usize, m: usize) -> Result<PretzelBound> {
    if m >= n {
        return Err(Error::Undefined(format!(
            "pretzel bound needs m < n (m={m}, n={n})"
        )));
    }
    let epsilon = 1.0 - m as f64 / n as f64;
    let raw = 30.0 / (n as f64 * epsilon.powi(3));
    Ok(PretzelBound {
        epsilon,
        raw,
        clamped: raw.min(1.0),
    })
}

/// Lower bounds on the probability that `k` draws with replacement from `s`
/// elements are distinct.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctTupleBound {
    /// `(1 - k/s)^k`
    pub power: f64,
    /// `1 - k²/s`
    pub linear: f64,
}

pub fn distinct_tuple_probability_lb(k: usize, s: usize) -> Result<DistinctTupleBound> {
    if s < k || s == 0 {
        return Err(Error::BadParams(format!("need s ≥ k (k={k}, s={s})")));
    }
    let (k, s) = (k as f64, s as f64);
    Ok(DistinctTupleBound {
        power: (1.0 - k / s).powf(k),
        linear: 1.0 - k * k / s,
    })
}
