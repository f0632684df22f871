//! Polarized random k-SAT.
//!
//! In the polarized model each clause picks `k` distinct variables, flips a
//! fair coin `B`, and negates each literal independently with probability `p`
//! (if `B = +1`) or `1-p` (if `B = -1`). `p = 1/2` is classical random k-SAT;
//! `p ∈ {0, 1}` gives monotone formulas whose clauses are all-pure or
//! all-negated.
//!
//! - [`formula`] and [`dimacs`]: CNF values and interchange.
//! - [`generator`]: seeded, nested and p-coupled formula sampling.
//! - [`solver`]: exact decision, model counting, spine variables.
//! - [`twosat`]: implication digraphs, bicycles, unicycles, pretzels.
//! - [`bounds`]: closed-form threshold and first-moment bounds.
//! - [`experiments`]: Monte Carlo estimation of satisfiability probabilities
//!   and thresholds.

pub mod bounds;
pub mod dimacs;
pub mod error;
pub mod experiments;
pub mod formula;
pub mod generator;
pub mod solver;
pub mod twosat;

pub use error::{Error, Result};
pub use formula::{make_clause, Assignment, Clause, Formula, Literal, Sign};
pub use generator::{ClauseRandomness, ModelParams, SeededStream};
pub use solver::{SatResult, SpineReport, Status};

/// Crate version, recorded in result files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
