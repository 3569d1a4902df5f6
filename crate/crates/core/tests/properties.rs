//! Property tests for the structural invariants that hold on every input,
//! not just the worked examples.

use proptest::prelude::*;
use std::collections::BTreeSet;

use subord_core::algorithms::{budget_threshold_add, threshold_add, TraceAction};
use subord_core::constraints::BudgetConstraint;
use subord_core::instances::{
    gen_random_budgets, gen_random_coverage, gen_random_markov, gen_random_mnl, markov_to_spec,
    mnl_to_spec, ConstraintSpec, InstanceFile,
};
use subord_core::oracle::{wrap_noisy, CountingOracle, ModularFn};
use subord_core::{marginal, ElemSet, ValueOracle};

proptest! {
    /// The bitset agrees with a BTreeSet model under mixed operations.
    #[test]
    fn elemset_matches_btreeset_model(ops in proptest::collection::vec((0usize..120, any::<bool>()), 0..60)) {
        let mut set = ElemSet::new();
        let mut model = BTreeSet::new();
        for (e, insert) in ops {
            if insert {
                prop_assert_eq!(set.insert(e), model.insert(e));
            } else {
                prop_assert_eq!(set.remove(e), model.remove(&e));
            }
            prop_assert_eq!(set.len(), model.len());
        }
        prop_assert_eq!(set.to_vec(), model.into_iter().collect::<Vec<_>>());
    }

    /// Union, intersection, and difference agree with the model.
    #[test]
    fn elemset_algebra(a in proptest::collection::btree_set(0usize..80, 0..20),
                       b in proptest::collection::btree_set(0usize..80, 0..20)) {
        let sa: ElemSet = a.iter().copied().collect();
        let sb: ElemSet = b.iter().copied().collect();
        prop_assert_eq!(sa.union(&sb).to_vec(), a.union(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!(sa.intersection(&sb).to_vec(), a.intersection(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!(sa.difference(&sb).to_vec(), a.difference(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
    }

    /// Every noisy evaluation stays inside the multiplicative band and is
    /// reproducible under the same seed.
    #[test]
    fn noisy_oracle_band(delta in 0.0..0.5f64, seed: u64,
                         elems in proptest::collection::btree_set(0usize..8, 0..8)) {
        let f = CountingOracle::new(gen_random_coverage(8, 99));
        let s: ElemSet = elems.into_iter().collect();
        let clean = f.eval(&s);
        let noisy = wrap_noisy(&f, delta, seed).unwrap();
        let v = noisy.eval(&s);
        prop_assert!(v >= (1.0 - delta) * clean - 1e-12);
        prop_assert!(v <= (1.0 + delta) * clean + 1e-12);
        let again = wrap_noisy(&f, delta, seed).unwrap();
        prop_assert_eq!(again.eval(&s), v);
    }

    /// The marginal helper is the definition, and costs one query when the
    /// base is empty, two otherwise.
    #[test]
    fn marginal_definition(seed in 0u64..50,
                           c in proptest::collection::btree_set(0usize..8, 1..5),
                           s in proptest::collection::btree_set(0usize..8, 0..5)) {
        let f = CountingOracle::new(gen_random_coverage(8, seed));
        let c: ElemSet = c.into_iter().collect();
        let s: ElemSet = s.into_iter().collect();
        let before = f.queries();
        let m = marginal(&f, &c, &s);
        let spent = f.queries() - before;
        prop_assert_eq!(spent, if s.is_empty() { 1 } else { 2 });
        let direct = f.eval(&c.union(&s)) - f.eval(&s);
        prop_assert!((m - direct).abs() < 1e-12);
    }

    /// Threshold accounting: the accepted set is worth at least its size
    /// times the threshold, and each parsed element costs one query.
    #[test]
    fn threshold_add_accounting(seed in 0u64..100, k in 1usize..6, tau in 0.05..2.0f64) {
        let f = CountingOracle::new(gen_random_coverage(9, seed));
        let seq: Vec<usize> = (0..9).collect();
        let run = threshold_add(&f, &seq, k, tau);
        prop_assert!(run.value >= run.solution.len() as f64 * tau - 1e-7);
        prop_assert!(run.solution.len() <= k);
        prop_assert_eq!(run.queries as usize, run.trace.len());
        prop_assert!(run.removed.is_empty());
        // Single pass: parse positions strictly increase.
        let positions: Vec<usize> = run.trace.iter().map(|ev| ev.element).collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    /// Budget threshold runs stay feasible and only accept elements whose
    /// marginal clears the per-unit threshold.
    #[test]
    fn budget_threshold_feasible(seed in 0u64..100, tau in 0.01..1.5f64) {
        let n = 9;
        let f = CountingOracle::new(gen_random_coverage(n, seed));
        let bc = gen_random_budgets(n, seed ^ 0xabcd);
        let seq: Vec<usize> = (0..n).collect();
        let run = budget_threshold_add(&f, &seq, &bc, tau);
        prop_assert!(bc.feasible(&run.solution));
        for ev in &run.trace {
            if let TraceAction::Add { gain } = ev.action {
                prop_assert!(gain >= tau * bc.budgets[ev.element] - 1e-9);
            }
        }
    }

    /// Unit budgets with total k reduce the budget rule to the cardinality
    /// rule exactly.
    #[test]
    fn unit_budget_reduction(seed in 0u64..60, k in 1usize..5, tau in 0.05..1.5f64) {
        let n = 8;
        let cov = gen_random_coverage(n, seed);
        let f = CountingOracle::new(cov.clone());
        let g = CountingOracle::new(cov);
        let seq: Vec<usize> = (0..n).collect();
        let a = budget_threshold_add(&f, &seq, &BudgetConstraint::cardinality(n, k), tau);
        let b = threshold_add(&g, &seq, k, tau);
        prop_assert_eq!(a.solution, b.solution);
    }

    /// Instance files survive a serialization round trip bit-for-bit.
    #[test]
    fn instance_round_trip(seed in 0u64..40, n in 2usize..7, markov: bool, k in 1usize..4) {
        let spec = if markov {
            markov_to_spec(&gen_random_markov(n, seed))
        } else {
            mnl_to_spec(&gen_random_mnl(n, seed))
        };
        let file = InstanceFile {
            spec,
            constraint: Some(ConstraintSpec::Cardinality { k }),
            order: Some((0..n).rev().collect()),
        };
        let text = serde_json::to_string(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&parsed, &file);
        parsed.build().unwrap();
    }

    /// Modular functions are exactly additive, so thresholds accept element
    /// weights directly regardless of what is already held.
    #[test]
    fn modular_marginals_are_weights(weights in proptest::collection::vec(0.0..3.0f64, 1..8),
                                     held in proptest::collection::btree_set(0usize..8, 0..4)) {
        let n = weights.len();
        let f = CountingOracle::new(ModularFn { weights: weights.clone() });
        let held: ElemSet = held.into_iter().filter(|e| *e < n).collect();
        for (e, w) in weights.iter().enumerate() {
            if held.contains(e) {
                continue;
            }
            let m = marginal(&f, &ElemSet::singleton(e), &held);
            prop_assert!((m - w).abs() < 1e-12);
        }
    }
}
