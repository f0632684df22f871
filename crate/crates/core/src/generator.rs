//! The polarized random k-SAT generator.
//!
//! Clause `i` is built from a record `(K_i, B_i, U_i)`: an ordered k-tuple of
//! distinct variables, a fair coin, and `k` uniforms in `[0,1)`. For a given
//! polarization `p`, slot `j` gets `P_j = +1` iff `U_j < p` and the literal on
//! `K_j` has sign `B·P_j`. Records depend only on `(seed, i)`, so formulas are
//! nested in `m` and share `(K, B, U)` across every `p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Clause, Formula, Literal, Sign};

/// Parameters of one model point `Φ_m(n, k, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub m: usize,
}

impl ModelParams {
    pub fn new(n: usize, k: usize, p: f64, m: usize) -> Result<ModelParams> {
        let params = ModelParams { n, k, p, m };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        validate_shape(self.n, self.k)?;
        validate_p(self.p)
    }

    /// `b = 1/2 - p`; meaningful for `p ≤ 1/2`.
    pub fn b(&self) -> f64 {
        0.5 - self.p
    }

    pub fn density(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

pub(crate) fn validate_shape(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::BadParams(format!("clause width k={k} must be at least 2")));
    }
    if k > n {
        return Err(Error::BadParams(format!("clause width k={k} exceeds n={n}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::BadParams(format!("n={n} too large")));
    }
    Ok(())
}

pub(crate) fn validate_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParams(format!("polarization p={p} outside [0,1]")));
    }
    Ok(())
}

/// The randomness behind a single clause.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClauseRandomness {
    /// Ordered distinct variable indices `K`.
    pub vars: Vec<u32>,
    /// The coin `B`.
    pub coin: Sign,
    /// Uniforms `U_j`; slot `j` is polarized-positive iff `U_j < p`.
    pub uniforms: Vec<f64>,
}

impl ClauseRandomness {
    /// `P_j` for polarization `p`.
    pub fn polarity(&self, j: usize, p: f64) -> Sign {
        Sign::from_bool(self.uniforms[j] < p)
    }

    /// The clause for polarization `p`: literal `j` on `K_j` with sign `B·P_j`.
    pub fn realize(&self, p: f64) -> Clause {
        let literals = self
            .vars
            .iter()
            .zip(&self.uniforms)
            .map(|(&v, &u)| {
                let sign = self.coin * Sign::from_bool(u < p);
                Literal::new(v, sign).expect("generator variables are 1-based")
            })
            .collect();
        Clause::from_literals(literals).expect("generator tuples are distinct")
    }
}

/// Counter-based source of clause records for one master seed.
///
/// Record `i` is drawn from ChaCha8 keyed by the seed on stream `i`: first the
/// coin, then the `k` uniforms, then an index stream from which the first `k`
/// distinct values form `K`.
#[derive(Clone, Debug)]
pub struct SeededStream {
    base: ChaCha8Rng,
    seed: u64,
    n: usize,
    k: usize,
    next: u64,
}

impl SeededStream {
    pub fn new(seed: u64, n: usize, k: usize) -> Result<SeededStream> {
        validate_shape(n, k)?;
        Ok(SeededStream {
            base: ChaCha8Rng::seed_from_u64(seed),
            seed,
            n,
            k,
            next: 1,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn rng_for(&self, i: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(i);
        rng
    }

    /// Record `i` (1-based); independent of any previous calls.
    pub fn record(&self, i: u64) -> ClauseRandomness {
        self.draw(i).0
    }

    /// Record `i` together with the with-replacement tuple `K̃` made of the
    /// first `k` raw index draws. `K = K̃` exactly when those draws are distinct.
    pub fn record_with_replacement_tuple(&self, i: u64) -> (ClauseRandomness, Vec<u32>) {
        self.draw(i)
    }

    fn draw(&self, i: u64) -> (ClauseRandomness, Vec<u32>) {
        let mut rng = self.rng_for(i);
        let coin = Sign::from_bool(rng.random::<bool>());
        let uniforms: Vec<f64> = (0..self.k).map(|_| rng.random::<f64>()).collect();
        let n = self.n as u32;
        let mut vars = Vec::with_capacity(self.k);
        let mut raw = Vec::with_capacity(self.k);
        while vars.len() < self.k {
            let v = rng.random_range(1..=n);
            if raw.len() < self.k {
                raw.push(v);
            }
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        (
            ClauseRandomness {
                vars,
                coin,
                uniforms,
            },
            raw,
        )
    }

    /// Records `1..=m` in order.
    pub fn records(&self, m: usize) -> Vec<ClauseRandomness> {
        (1..=m as u64).map(|i| self.record(i)).collect()
    }
}

impl Iterator for SeededStream {
    type Item = ClauseRandomness;

    fn next(&mut self) -> Option<ClauseRandomness> {
        let r = self.record(self.next);
        self.next += 1;
        Some(r)
    }
}

/// The `i`-th clause record (1-based) for `(seed, n, k)`.
pub fn clause_randomness(seed: u64, i: u64, n: usize, k: usize) -> Result<ClauseRandomness> {
    if i == 0 {
        return Err(Error::BadParams("clause indices start at 1".into()));
    }
    Ok(SeededStream::new(seed, n, k)?.record(i))
}

pub fn realize_clause(record: &ClauseRandomness, p: f64) -> Clause {
    record.realize(p)
}

/// Realizes records as a formula at polarization `p`.
pub fn realize_formula(n: usize, k: usize, records: &[ClauseRandomness], p: f64) -> Formula {
    let mut f = Formula::with_capacity(n, k, records.len());
    for r in records {
        f.push(r.realize(p)).expect("records match (n, k)");
    }
    f
}

/// `Φ_m(n, k, p)` from clause records `1..=m`.
pub fn sample_formula(params: &ModelParams, seed: u64) -> Result<Formula> {
    params.validate()?;
    let stream = SeededStream::new(seed, params.n, params.k)?;
    let mut f = Formula::with_capacity(params.n, params.k, params.m);
    for i in 1..=params.m as u64 {
        f.push(stream.record(i).realize(params.p))?;
    }
    Ok(f)
}

/// Formulas for every `p` in `p_list`, all realized from the same records.
pub fn coupled_family(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    p_list: &[f64],
) -> Result<Vec<Formula>> {
    if p_list.is_empty() {
        return Err(Error::BadParams("empty polarization list".into()));
    }
    for &p in p_list {
        validate_p(p)?;
    }
    let records = SeededStream::new(seed, n, k)?.records(m);
    Ok(p_list
        .iter()
        .map(|&p| realize_formula(n, k, &records, p))
        .collect())
}
