use statrs::function::beta::inv_beta_reg;

/// Two-sided exact binomial (Clopper–Pearson) interval at level `1 - alpha`.
pub fn clopper_pearson(successes: usize, trials: usize, alpha: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        inv_beta_reg(x, n - x + 1.0, alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        inv_beta_reg(x + 1.0, n - x, 1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Binomial standard error `sqrt(P̂(1-P̂)/T)`.
pub fn standard_error(p_hat: f64, trials: usize) -> f64 {
    (p_hat * (1.0 - p_hat) / trials as f64).sqrt()
}

/// Pooled two-proportion standard error of `P̂_a - P̂_b`.
pub fn pooled_standard_error(sat_a: usize, trials_a: usize, sat_b: usize, trials_b: usize) -> f64 {
    let pooled = (sat_a + sat_b) as f64 / (trials_a + trials_b) as f64;
    (pooled * (1.0 - pooled) * (1.0 / trials_a as f64 + 1.0 / trials_b as f64)).sqrt()
}

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
