mod common;

use proptest::prelude::*;

use polarsat::bounds::violation_probability;
use polarsat::dimacs::{parse_dimacs, to_dimacs, to_dimacs_with_meta, DimacsMeta};
use polarsat::generator::{coupled_family, sample_formula};
use polarsat::{make_clause, Assignment, Formula, ModelParams, SeededStream, Sign};

/// (n, k, clauses as (vars, signs)) with distinct variables per clause.
fn formula_strategy() -> impl Strategy<Value = Formula> {
    (1usize..=12)
        .prop_flat_map(|n| (Just(n), 1..=n.min(4)))
        .prop_flat_map(|(n, k)| {
            let clause = (
                proptest::sample::subsequence((1..=n as u32).collect::<Vec<_>>(), k).prop_shuffle(),
                proptest::collection::vec(any::<bool>(), k),
            );
            (Just(n), Just(k), proptest::collection::vec(clause, 0..20))
        })
        .prop_map(|(n, k, clauses)| {
            let clauses = clauses
                .into_iter()
                .map(|(vars, signs)| {
                    let signs: Vec<Sign> = signs.into_iter().map(Sign::from_bool).collect();
                    make_clause(n, &vars, &signs).unwrap()
                })
                .collect();
            Formula::from_clauses(n, k, clauses).unwrap()
        })
}

proptest! {
    #[test]
    fn dimacs_round_trip(f in formula_strategy()) {
        let (back, meta) = parse_dimacs(&to_dimacs(&f), Some(f.k())).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(meta, DimacsMeta::default());
    }

    #[test]
    fn dimacs_meta_round_trip(f in formula_strategy(), seed in any::<u64>(), p in 0.0f64..=1.0) {
        let meta = DimacsMeta { k: Some(f.k()), p: Some(p), seed: Some(seed) };
        let (back, got) = parse_dimacs(&to_dimacs_with_meta(&f, &meta), None).unwrap();
        prop_assert_eq!(got, meta);
        prop_assert_eq!(back.clauses(), f.clauses());
    }

    #[test]
    fn evaluation_matches_bitmask_semantics(f in formula_strategy(), bits in any::<u64>()) {
        let bits = bits & ((1u64 << f.n()) - 1);
        let a = Assignment::from_bits(f.n(), bits);
        prop_assert_eq!(f.is_satisfied_by(&a), common::satisfies(&common::masks(&f), bits));
        prop_assert_eq!(f.evaluate(&a).unwrap().is_pos(), f.is_satisfied_by(&a));
    }

    #[test]
    fn q_tilde_is_at_least_two_to_minus_k(n in 1usize..200, k in 1usize..8, p in 0.0f64..=1.0, frac in 0.0f64..=1.0) {
        let i = ((n as f64) * frac) as usize;
        let q = violation_probability(i, n, k, p).unwrap().q_tilde;
        prop_assert!(q >= 0.5f64.powi(k as i32) * (1.0 - 1e-12));
        prop_assert!(q <= 1.0);
    }

    #[test]
    fn generated_clauses_are_well_formed(seed in any::<u64>(), n in 4usize..50, k in 2usize..=4, p in 0.0f64..=1.0, m in 0usize..60) {
        let f = sample_formula(&ModelParams::new(n, k, p, m).unwrap(), seed).unwrap();
        prop_assert_eq!(f.m(), m);
        for c in f.clauses() {
            let mut vars: Vec<u32> = c.literals().iter().map(|l| l.var()).collect();
            prop_assert_eq!(vars.len(), k);
            prop_assert!(vars.iter().all(|&v| v >= 1 && v as usize <= n));
            vars.sort_unstable();
            vars.dedup();
            prop_assert_eq!(vars.len(), k);
        }
    }

    #[test]
    fn formulas_are_nested_in_m(seed in any::<u64>(), n in 3usize..30, p in 0.0f64..=1.0, m in 1usize..40, cut in 0usize..40) {
        let cut = cut.min(m);
        let long = sample_formula(&ModelParams::new(n, 3, p, m).unwrap(), seed).unwrap();
        let short = sample_formula(&ModelParams::new(n, 3, p, cut).unwrap(), seed).unwrap();
        prop_assert_eq!(long.prefix(cut), short);
    }

    #[test]
    fn coupling_across_p(seed in any::<u64>(), n in 3usize..30, m in 1usize..30, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fam = coupled_family(n, 3, m, seed, &[lo, hi]).unwrap();
        let records = SeededStream::new(seed, n, 3).unwrap().records(m);
        for ((r, c_lo), c_hi) in records.iter().zip(fam[0].clauses()).zip(fam[1].clauses()) {
            for ((x, y), &v) in c_lo.literals().iter().zip(c_hi.literals()).zip(&r.vars) {
                prop_assert_eq!(x.var(), v);
                prop_assert_eq!(y.var(), v);
                // polarity P_j = sign·B can only switch from -1 to +1 as p grows
                let (p_lo, p_hi) = (x.sign() * r.coin, y.sign() * r.coin);
                prop_assert!(p_lo == Sign::Neg || p_hi == Sign::Pos);
            }
        }
    }
}
