//! The twelve acceptance criteria, each at its stated size and tolerance.
//!
//! Runs without the libtest harness so the verdict lines always print:
//! one `PASS`/`FAIL` line per criterion, then a nonzero exit if any failed.
//! `POLARSAT_ACCEPTANCE=1,5,12` restricts the run to the listed criteria.
//! The full run takes tens of minutes on one core, most of it in criterion 3.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polarsat::bounds::{
    exact_violation_probability, log2_expected_models_with_slack, pretzel_probability_bound,
};
use polarsat::experiments::stats::standard_error;
use polarsat::experiments::{
    estimate_breakpoints, estimate_sat_probability, monotonicity_sweep, run_plan, RunOptions,
    SolverChoice, TrialPlan,
};
use polarsat::generator::sample_formula;
use polarsat::solver::{blocked_clause_predicate, spine_set, Dpll};
use polarsat::twosat::{
    find_pretzel, find_unicycle, has_bicycle, implication_digraph, is_valid_bicycle, solve_2sat,
};
use polarsat::{make_clause, Formula, ModelParams, Sign};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

/// 2-SAT phase transition at n = 10^4.
fn ac1() -> Outcome {
    let n = 10_000;
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, p) in [0.0, 0.25, 0.5].into_iter().enumerate() {
        let below = ModelParams::new(n, 2, p, 8_000).map_err(fail)?;
        let above = ModelParams::new(n, 2, p, 12_500).map_err(fail)?;
        let lo = estimate_sat_probability(&below, 200, 100 + i as u64, SolverChoice::TwoSat).map_err(fail)?;
        let hi = estimate_sat_probability(&above, 200, 200 + i as u64, SolverChoice::TwoSat).map_err(fail)?;
        ok &= lo.p_hat >= 0.95 && hi.p_hat <= 0.05;
        lines.push(format!("p={p}: P(0.8n)={:.3} P(1.25n)={:.3}", lo.p_hat, hi.p_hat));
    }
    check(ok, lines.join("; "))
}

/// 2-SAT median breakpoint at n = 10^4.
fn ac2() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, p) in [0.0, 0.5].into_iter().enumerate() {
        let r = estimate_breakpoints(10_000, 2, p, 100, 300 + i as u64, SolverChoice::TwoSat).map_err(fail)?;
        ok &= (0.9..=1.1).contains(&r.median_density);
        lines.push(format!("p={p}: median m*/n={:.4}", r.median_density));
    }
    check(ok, lines.join("; "))
}

/// Classical 3-SAT threshold window at n = 300.
fn ac3() -> Outcome {
    let r = estimate_breakpoints(300, 3, 0.5, 100, 400, SolverChoice::Exact).map_err(fail)?;
    check(
        (3.8..=4.8).contains(&r.median_density),
        format!("median m*/n={:.4}", r.median_density),
    )
}

/// Above the first-moment density nothing is satisfiable.
fn ac4() -> Outcome {
    let n = 300;
    let m = (5.5 * n as f64).ceil() as usize;
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, p) in [0.0, 0.25, 0.5].into_iter().enumerate() {
        let params = ModelParams::new(n, 3, p, m).map_err(fail)?;
        let r = estimate_sat_probability(&params, 100, 500 + i as u64, SolverChoice::Exact).map_err(fail)?;
        ok &= r.p_hat <= 0.05;
        lines.push(format!("p={p}: P={:.3}", r.p_hat));
    }
    check(ok, format!("m={m}; {}", lines.join("; ")))
}

/// Polarized formulas are at least as satisfiable as classical ones.
fn ac5() -> Outcome {
    let s = monotonicity_sweep(200, 3, 850, &[0.0, 0.5], 2000, 600, SolverChoice::Exact).map_err(fail)?;
    let d = s.difference(0, 1);
    check(
        d.difference >= -3.0 * d.pooled_se,
        format!(
            "P(0)={:.4} P(0.5)={:.4} pooled SE={:.4} discordant={:?}",
            s.records[0].p_hat, s.records[1].p_hat, d.pooled_se, d.discordant
        ),
    )
}

/// DPLL agrees with enumeration.
fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let (mut sat, mut disagreements) = (0, 0);
    for trial in 0..1000u64 {
        let k = rng.random_range(2..=4usize);
        let n = rng.random_range(k.max(4)..=16usize);
        let m = rng.random_range(1..=8 * n);
        let p = rng.random_range(0.0..=1.0);
        let f = sample_formula(&ModelParams::new(n, k, p, m).map_err(fail)?, trial).map_err(fail)?;
        let expected = common::is_sat(&f);
        let got = Dpll::new(&f).solve(&[]);
        let witness_ok = got.as_ref().is_none_or(|w| f.is_satisfied_by(w));
        if got.is_some() != expected || !witness_ok {
            disagreements += 1;
        }
        sat += usize::from(expected);
    }
    check(disagreements == 0, format!("1000 instances ({sat} SAT), {disagreements} disagreements"))
}

/// Random satisfiable formula with plenty of spine variables.
fn satisfiable_formula(rng: &mut ChaCha8Rng, seed: u64) -> polarsat::Result<(Formula, Vec<u64>)> {
    loop {
        let k = rng.random_range(2..=3usize);
        let n = rng.random_range(6..=14usize);
        let density = if k == 2 { rng.random_range(0.6..1.2) } else { rng.random_range(3.0..4.6) };
        let m = (density * n as f64) as usize;
        let p = rng.random_range(0.0..=1.0);
        let f = sample_formula(&ModelParams::new(n, k, p, m)?, seed ^ rng.random::<u64>())?;
        let models = common::models(&f);
        if !models.is_empty() {
            return Ok((f, models));
        }
    }
}

/// A clause is blocked exactly when adding it makes the formula UNSAT.
fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    let (mut blocked, mut disagreements, mut spine_mismatch) = (0, 0, 0);
    for t in 0..500u64 {
        let (f, models) = satisfiable_formula(&mut rng, t).map_err(fail)?;
        let n = f.n();
        let report = spine_set(&f).map_err(fail)?;
        let (pos, neg) = common::spines(n, &models);
        if report.positive != pos || report.negative != neg {
            spine_mismatch += 1;
        }
        let locked: Vec<u32> = pos.iter().chain(&neg).copied().collect();
        for _ in 0..20 {
            let width = rng.random_range(1..=3usize);
            // half the clauses draw from locked variables so both verdicts occur
            let pool: Vec<u32> = if rng.random_bool(0.5) && locked.len() >= width {
                locked.clone()
            } else {
                (1..=n as u32).collect()
            };
            let mut vars = Vec::new();
            while vars.len() < width {
                let v = pool[rng.random_range(0..pool.len())];
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            let signs: Vec<Sign> = (0..width).map(|_| Sign::from_bool(rng.random())).collect();
            let clause = make_clause(n, &vars, &signs).map_err(fail)?;
            let (cp, cn) = common::masks(&Formula::from_clauses(n, width, vec![clause.clone()]).map_err(fail)?)[0];
            let unsat = !models.iter().any(|&b| b & cp != 0 || !b & cn != 0);
            let predicate = blocked_clause_predicate(&report, &clause);
            disagreements += usize::from(predicate != unsat);
            blocked += usize::from(unsat);
        }
    }
    check(
        disagreements == 0 && spine_mismatch == 0,
        format!(
            "10000 clauses ({blocked} blocking), {disagreements} disagreements, {spine_mismatch} spine mismatches"
        ),
    )
}

/// unicycle ⇒ bicycle ⇒ pretzel, and UNSAT ⇔ bicycle, on small 2-SAT digraphs.
fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let mut violations = Vec::new();
    let (mut unicycles, mut bicycles, mut pretzels) = (0, 0, 0);
    for t in 0..500u64 {
        let n = rng.random_range(4..=40usize);
        let m = rng.random_range(n / 2..=3 * n / 2);
        let p = rng.random_range(0.0..=1.0);
        let f = sample_formula(&ModelParams::new(n, 2, p, m).map_err(fail)?, t).map_err(fail)?;
        let g = implication_digraph(&f).map_err(fail)?;
        let uni = find_unicycle(&g).map_err(fail)?;
        let bi = has_bicycle(&g);
        let pretzel = find_pretzel(&g, n);
        let unsat = !solve_2sat(&f).map_err(fail)?.is_sat();
        let valid = uni.as_ref().is_none_or(|u| u.is_valid(&g))
            && bi.as_ref().is_none_or(|b| is_valid_bicycle(&g, &b.walk))
            && pretzel.as_ref().is_none_or(|q| q.is_valid(&g));
        let chain = (uni.is_none() || bi.is_some()) && (bi.is_none() || pretzel.is_some());
        if !valid || !chain || unsat != bi.is_some() {
            violations.push(t);
        }
        unicycles += usize::from(uni.is_some());
        bicycles += usize::from(bi.is_some());
        pretzels += usize::from(pretzel.is_some());
    }
    check(
        violations.is_empty(),
        format!(
            "500 digraphs: {unicycles} unicycle, {bicycles} bicycle, {pretzels} pretzel; violations at {violations:?}"
        ),
    )
}

/// Pretzels are rare below density one.
fn ac9() -> Outcome {
    let (n, m, trials) = (1000, 500, 500);
    let bound = pretzel_probability_bound(n, m).map_err(fail)?.clamped;
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, p) in [0.0, 0.25, 0.5].into_iter().enumerate() {
        let mut found = 0;
        for t in 0..trials as u64 {
            let seed = (1000 + i as u64) << 32 | t;
            let f = sample_formula(&ModelParams::new(n, 2, p, m).map_err(fail)?, seed).map_err(fail)?;
            found += usize::from(find_pretzel(&implication_digraph(&f).map_err(fail)?, n).is_some());
        }
        let freq = found as f64 / trials as f64;
        let limit = bound + 3.0 * standard_error(freq, trials);
        ok &= freq <= limit;
        lines.push(format!("p={p}: {freq:.3} <= {limit:.3}"));
    }
    check(ok, format!("bound={bound:.3}; {}", lines.join("; ")))
}

/// Satisfiability never exceeds the first-moment bound by more than noise.
fn ac10() -> Outcome {
    let n = 100;
    let mut worst = f64::NEG_INFINITY;
    let mut lines = Vec::new();
    for (i, p) in [0.0, 0.3, 0.5].into_iter().enumerate() {
        for (j, density) in [4, 5, 6, 7].into_iter().enumerate() {
            let m = density * n;
            let params = ModelParams::new(n, 3, p, m).map_err(fail)?;
            let r = estimate_sat_probability(&params, 200, 1100 + 10 * i as u64 + j as u64, SolverChoice::Exact)
                .map_err(fail)?;
            let markov = log2_expected_models_with_slack(n, 3, p, m).map_err(fail)?.exp2().min(1.0);
            let excess = r.p_hat - markov - 3.0 * r.standard_error();
            worst = worst.max(excess);
            if excess > 0.0 {
                lines.push(format!("p={p} m/n={density}: P={:.3} bound={markov:.3}", r.p_hat));
            }
        }
    }
    check(
        lines.is_empty(),
        format!("12 points, max excess over bound+3SE = {worst:.3} {}", lines.join("; ")),
    )
}

/// Exact q_i by enumerating every ordered tuple, coin and polarity pattern.
fn exact_q(i: usize, n: usize, k: usize, p: Ratio<i64>) -> Ratio<i64> {
    let one = Ratio::from_integer(1);
    let half = Ratio::new(1, 2);
    let mut total = Ratio::from_integer(0);
    let mut tuples = 0i64;
    let mut tuple = Vec::new();
    fn each(n: usize, k: usize, tuple: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if tuple.len() == k {
            return f(tuple);
        }
        for v in 1..=n {
            if !tuple.contains(&v) {
                tuple.push(v);
                each(n, k, tuple, f);
                tuple.pop();
            }
        }
    }
    each(n, k, &mut tuple, &mut |vars| {
        tuples += 1;
        for coin in [1i64, -1] {
            for pattern in 0..1u32 << k {
                // polarity P_j = +1 has probability p
                let mut weight = half;
                let mut violated = true;
                for (j, &v) in vars.iter().enumerate() {
                    let polarity = if pattern >> j & 1 == 1 { 1 } else { -1 };
                    weight *= if polarity == 1 { p } else { one - p };
                    let literal_positive = coin * polarity == 1;
                    let variable_true = v <= i;
                    violated &= literal_positive != variable_true;
                }
                if violated {
                    total += weight;
                }
            }
        }
    });
    total / tuples
}

fn q_tilde(i: usize, n: usize, k: usize, p: Ratio<i64>) -> Ratio<i64> {
    let one = Ratio::from_integer(1);
    let theta = Ratio::new(i as i64, n as i64);
    let rho = p * (one - theta) + (one - p) * theta;
    let pow = |x: Ratio<i64>| (0..k).fold(one, |a, _| a * x);
    Ratio::new(1, 2) * (pow(rho) + pow(one - rho))
}

/// The replacement claim at n = 6, k = 3, in exact arithmetic.
fn ac11() -> Outcome {
    let (n, k) = (6usize, 3usize);
    let slack = Ratio::new((k * k) as i64, n as i64);
    let floor = Ratio::new(1, 1 << k) - slack;
    let mut failures = Vec::new();
    let mut max_gap = Ratio::from_integer(0);
    for (p, p_exact) in [(0.0, Ratio::new(0, 1)), (0.3, Ratio::new(3, 10)), (0.5, Ratio::new(1, 2))] {
        for i in 0..=n {
            let q = exact_q(i, n, k, p_exact);
            let qt = q_tilde(i, n, k, p_exact);
            let gap = if q > qt { q - qt } else { qt - q };
            max_gap = max_gap.max(gap);
            let library = exact_violation_probability(i, n, k, p).map_err(fail)?;
            let library_ok = (library - *q.numer() as f64 / *q.denom() as f64).abs() < 1e-12;
            if q < floor || gap > slack || !library_ok {
                failures.push(format!("p={p} i={i} q={q}"));
            }
        }
    }
    check(
        failures.is_empty(),
        format!("21 cases, max |q-q~| = {max_gap} (slack {slack}) {}", failures.join("; ")),
    )
}

/// Result bodies do not depend on the worker count.
fn ac12() -> Outcome {
    let plans = [
        "kind = \"sweep\"\nn = 60\nk = 3\np_grid = [0.0, 0.2, 0.5]\ndensity_grid = [3.5, 4.5]\ntrials = 40\nseed = 12\n",
        "kind = \"threshold\"\nn = 40\nk = 3\np_grid = [0.1, 0.5]\ntrials = 24\nseed = 13\n",
        "kind = \"threshold\"\nn = 500\nk = 2\np_grid = [0.0, 0.5]\ntrials = 24\nseed = 14\n",
        "kind = \"spines\"\nn = 30\nk = 3\np_grid = [0.2]\ndensity_grid = [3.0, 3.8]\ntrials = 24\nseed = 15\n",
    ];
    let dir = tempfile::tempdir().map_err(fail)?;
    let mut mismatched = Vec::new();
    for (i, text) in plans.iter().enumerate() {
        let plan = TrialPlan::from_toml(text).map_err(fail)?;
        let bodies = [1, 4, 8]
            .into_iter()
            .map(|w| {
                let out = dir.path().join(format!("plan{i}_w{w}.csv"));
                let options = RunOptions {
                    workers: Some(w),
                    verbose: false,
                };
                run_plan(&plan, &out, &options).map(|o| o.body.to_json())
            })
            .collect::<polarsat::Result<Vec<String>>>()
            .map_err(fail)?;
        if bodies.iter().any(|b| b != &bodies[0]) {
            mismatched.push(i);
        }
    }
    check(
        mismatched.is_empty(),
        format!("{} plans x workers {{1,4,8}}; mismatched plans {mismatched:?}", plans.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("2-SAT transition, n=1e4", ac1),
        ("2-SAT median breakpoint, n=1e4", ac2),
        ("3-SAT breakpoint window, n=300", ac3),
        ("UNSAT above upper density", ac4),
        ("monotonicity in p, coupled", ac5),
        ("DPLL vs enumeration", ac6),
        ("blocked clause predicate", ac7),
        ("unicycle => bicycle => pretzel", ac8),
        ("pretzel frequency bound", ac9),
        ("first-moment Markov check", ac10),
        ("exact q_i vs replacement model", ac11),
        ("determinism across workers", ac12),
    ];
    // `cargo test` passes harness flags such as `--nocapture`; ignore them
    let only: Option<Vec<usize>> = std::env::var("POLARSAT_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let id = idx + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (verdict, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("AC{id:<2} {verdict}  {name}: {detail} [{secs:.1}s]");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
