//! Constrained assortment optimization for compatible choice models.
//!
//! When no traversal order for the monotonized objective is evident, the
//! framework builds a partial one on the fly: run the single-pass algorithm
//! on the current unconstrained optimum, keep everything it held, discard
//! what it parsed and rejected, re-solve the unconstrained problem on what
//! remains, and append the newly revealed products at the end of the order.
//! The phase history it leaves behind is auditable: [`check_piecewise_order`]
//! verifies exhaustively that marginals shrink across exactly these phases.

use crate::algorithms::{enumerate_params, run_one, AlgorithmTag, ParamSetting, RunResult};
use crate::assortment::{AssortmentOracle, ChoiceModel};
use crate::constraints::Constraint;
use crate::error::Error;
use crate::ground::ElemSet;
use crate::oracle::{wrap_noisy, ValueOracle};
use crate::verify::Witness;
use crate::TOL;

/// Cap for the exhaustive piecewise-order check.
pub const CAP_PIECEWISE: usize = 10;

/// One phase: the elements first exposed to the inner algorithm during the
/// phase, and the subset of them it ended the phase holding.
#[derive(Clone, Debug)]
pub struct PhaseRecord {
    pub exposed: ElemSet,
    pub picked: ElemSet,
}

/// The full phase structure left behind by one parameter setting's run:
/// the per-phase (exposed, picked) pairs, the elements never exposed, and
/// the traversal order the phases were appended in.
#[derive(Clone, Debug)]
pub struct PhaseHistory {
    pub n: usize,
    pub phases: Vec<PhaseRecord>,
    pub never_exposed: ElemSet,
    /// All `n` elements: exposure order first, never-exposed elements last.
    pub order: Vec<usize>,
}

/// Result of the phase loop for one parameter setting.
#[derive(Clone, Debug)]
pub struct GammaOutcome {
    pub setting: ParamSetting,
    pub result: RunResult,
    pub history: PhaseHistory,
    /// Monotonized-oracle queries spent across all phases of this setting.
    pub total_queries: u64,
}

/// Best-of over the enumerated parameter settings.
#[derive(Debug)]
pub struct FrameworkResult {
    pub outcomes: Vec<GammaOutcome>,
    pub best: usize,
}

impl FrameworkResult {
    pub fn best_outcome(&self) -> &GammaOutcome {
        &self.outcomes[self.best]
    }
}

/// Runs the phase framework for every parameter setting of the tagged
/// algorithm and keeps the best final solution.
///
/// Parameter settings are enumerated once against the full ground set.
/// Each setting gets a fresh memoizing oracle; `noise` optionally wraps it
/// in a multiplicative-error oracle with the given `(delta, seed)`.
pub fn run_framework(
    tag: AlgorithmTag,
    model: &dyn ChoiceModel,
    constraint: &Constraint,
    eps: f64,
    noise: Option<(f64, u64)>,
) -> Result<FrameworkResult, Error> {
    let n = model.n_products();
    let full_seq: Vec<usize> = (0..n).collect();
    let settings = {
        let setup = AssortmentOracle::new(model);
        match noise {
            Some((delta, seed)) => {
                let noisy = wrap_noisy(&setup, delta, seed)?;
                enumerate_params(tag, &noisy, &full_seq, constraint, eps)?
            }
            None => enumerate_params(tag, &setup, &full_seq, constraint, eps)?,
        }
    };
    if settings.is_empty() {
        return Err(Error::Internal(
            "parameter enumeration produced no settings".into(),
        ));
    }
    let mut outcomes = Vec::with_capacity(settings.len());
    for setting in settings {
        let oracle = AssortmentOracle::new(model);
        let outcome = match noise {
            Some((delta, seed)) => {
                let noisy = wrap_noisy(&oracle, delta, seed)?;
                run_phases(&setting, model, &noisy, constraint)?
            }
            None => run_phases(&setting, model, &oracle, constraint)?,
        };
        outcomes.push(outcome);
    }
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate().skip(1) {
        if o.result.value > outcomes[best].result.value + TOL {
            best = i;
        }
    }
    Ok(FrameworkResult { outcomes, best })
}

fn run_phases(
    setting: &ParamSetting,
    model: &dyn ChoiceModel,
    f: &dyn ValueOracle,
    constraint: &Constraint,
) -> Result<GammaOutcome, Error> {
    let n = model.n_products();
    let mut avail: ElemSet = (0..n).collect();
    let mut exposure_order: Vec<usize> = Vec::new();
    let mut exposed = ElemSet::new();
    let mut held = ElemSet::new();
    let mut phases = Vec::new();
    let mut last_run = RunResult::empty();

    let (opt, _) = model.unconstrained_opt(&avail)?;
    let mut working = opt;
    expose(&mut exposure_order, &mut exposed, &working, model.prices());

    let mut guard = 0usize;
    while !working.difference(&held).is_empty() {
        guard += 1;
        if guard > n + 1 {
            return Err(Error::Internal(format!(
                "phase loop failed to terminate within {} phases",
                n + 1
            )));
        }
        let newly = working.difference(&held);
        let seq: Vec<usize> = exposure_order
            .iter()
            .copied()
            .filter(|e| working.contains(*e))
            .collect();
        let run = run_one(setting, f, &seq, constraint)?;
        held = run.solution.union(&run.removed);
        phases.push(PhaseRecord {
            exposed: newly.clone(),
            picked: held.intersection(&newly),
        });
        last_run = run;

        avail = avail.difference(&working).union(&held);
        let (opt, _) = model.unconstrained_opt(&avail)?;
        working = opt.union(&held);
        expose(&mut exposure_order, &mut exposed, &working, model.prices());
    }

    let never_exposed: ElemSet = (0..n).filter(|e| !exposed.contains(*e)).collect();
    let mut order = exposure_order.clone();
    order.extend(never_exposed.iter());
    let history = PhaseHistory {
        n,
        phases,
        never_exposed,
        order,
    };
    Ok(GammaOutcome {
        setting: setting.clone(),
        result: last_run,
        history,
        total_queries: f.queries(),
    })
}

/// Appends the batch's unseen elements to the growing order. Inside a
/// batch the order is free; descending price (ties toward the smaller id)
/// keeps the whole order price-consistent for prefix-structured optima.
fn expose(order: &mut Vec<usize>, seen: &mut ElemSet, batch: &ElemSet, prices: &[f64]) {
    let mut fresh: Vec<usize> = batch.iter().filter(|&e| !seen.contains(e)).collect();
    fresh.sort_by(|&a, &b| prices[b].partial_cmp(&prices[a]).unwrap().then(a.cmp(&b)));
    for e in fresh {
        seen.insert(e);
        order.push(e);
    }
}

/// Exhaustive piecewise-order check against a phase history: for every
/// proper set `A` (per-phase intersections confined to that phase's picked
/// set), every `B ⊆ A`, and every `C` strictly right of `A` in the history
/// order, marginals must shrink: `f(C|A) ≤ f(C|B)`. Requires `n ≤ 10`.
pub fn check_piecewise_order(
    f: &dyn ValueOracle,
    history: &PhaseHistory,
) -> Result<Option<Witness>, Error> {
    let n = history.n;
    if n > CAP_PIECEWISE {
        return Err(Error::CapExceeded {
            what: "piecewise-order check",
            cap: CAP_PIECEWISE,
            n,
        });
    }
    let mut rank = vec![usize::MAX; n];
    for (i, &e) in history.order.iter().enumerate() {
        rank[e] = i;
    }
    let table: Vec<f64> = (0u64..1 << n)
        .map(|m| f.eval(&ElemSet::from_mask(m)))
        .collect();

    // Phase blocks, with the never-exposed tail as a final phase that
    // contributed nothing.
    let mut blocks: Vec<(u64, u64)> = history
        .phases
        .iter()
        .map(|p| (p.exposed.to_mask(), p.picked.to_mask()))
        .collect();
    blocks.push((history.never_exposed.to_mask(), 0));

    let rightward = |a: u64| -> u64 {
        let max_rank = (0..n)
            .filter(|&e| a >> e & 1 == 1)
            .map(|e| rank[e])
            .max()
            .unwrap();
        (0..n)
            .filter(|&e| rank[e] > max_rank)
            .fold(0u64, |m, e| m | 1 << e)
    };

    let mut picked_prefix = 0u64;
    for (exposed, picked) in blocks {
        let candidates = picked_prefix | exposed;
        let mut a = candidates;
        loop {
            if a != 0 {
                let right = rightward(a);
                if right != 0 {
                    if let Some(w) = violation_for(a, right, &table) {
                        return Ok(Some(w));
                    }
                }
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & candidates;
        }
        picked_prefix |= picked;
    }
    Ok(None)
}

fn violation_for(a: u64, right: u64, table: &[f64]) -> Option<Witness> {
    let mut c = right;
    while c > 0 {
        let against_a = table[(a | c) as usize] - table[a as usize];
        let mut b = a;
        loop {
            b = if b == 0 { break } else { (b - 1) & a };
            let against_b = table[(b | c) as usize] - table[b as usize];
            if against_a > against_b + TOL {
                return Some(Witness {
                    property: "piecewise-order",
                    a: ElemSet::from_mask(a),
                    b: ElemSet::from_mask(b),
                    c: ElemSet::from_mask(c),
                    slack: against_a - against_b,
                });
            }
            if b == 0 {
                break;
            }
        }
        c = (c - 1) & right;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assortment::{best_sub_value, descending_price_order, MnlModel};
    use crate::instances::{gen_markov_4item, gen_random_markov, gen_random_mnl};
    use crate::verify::brute_force_opt;

    #[test]
    fn framework_terminates_and_is_feasible() {
        for seed in 0..5 {
            let model = gen_random_markov(6, 600 + seed);
            let result = run_framework(
                AlgorithmTag::Cardinality,
                &model,
                &Constraint::Cardinality(2),
                0.2,
                None,
            )
            .unwrap();
            for o in &result.outcomes {
                assert!(o.result.solution.len() <= 2);
                assert!(o.history.phases.len() <= 7);
                // Phase exposures partition the ground set together with the
                // never-exposed tail.
                let mut all = o.history.never_exposed.clone();
                let mut total = all.len();
                for p in &o.history.phases {
                    total += p.exposed.len();
                    all.union_with(&p.exposed);
                }
                assert_eq!(total, 6, "phases overlap");
                assert_eq!(all, (0..6).collect());
            }
        }
    }

    #[test]
    fn framework_single_phase_when_everything_is_optimal() {
        // All products priced identically under MNL: the unconstrained
        // optimum is the full set, so the loop exposes everything at once.
        let model = MnlModel::new(vec![1.0, 2.0, 0.5], 1.0, vec![3.0, 3.0, 3.0]).unwrap();
        let result = run_framework(
            AlgorithmTag::Cardinality,
            &model,
            &Constraint::Cardinality(2),
            0.3,
            None,
        )
        .unwrap();
        for o in &result.outcomes {
            assert_eq!(o.history.phases.len(), 1);
            assert_eq!(o.history.phases[0].exposed, (0..3).collect::<ElemSet>());
        }
    }

    #[test]
    fn framework_value_at_least_direct_order_run_mnl() {
        // The monotonized MNL objective already has a known order; the
        // framework must do at least as well as running on it directly, and
        // both clear the cardinality guarantee.
        use crate::algorithms::cardinality_max;
        for seed in 0..8 {
            let model = gen_random_mnl(7, 700 + seed);
            let k = 3;
            let eps = 0.1;
            let fw = run_framework(
                AlgorithmTag::Cardinality,
                &model,
                &Constraint::Cardinality(k),
                eps,
                None,
            )
            .unwrap();
            let oracle = AssortmentOracle::new(&model);
            let order = descending_price_order(crate::assortment::ChoiceModel::prices(&model));
            let direct = cardinality_max(&oracle, &order, k, eps).unwrap();

            let audit = AssortmentOracle::new(&model);
            let (_, opt) = brute_force_opt(&audit, &Constraint::Cardinality(k)).unwrap();
            let bound = (1.0 - eps) * 0.5 * opt;
            assert!(
                fw.best_outcome().result.value >= bound - 1e-9,
                "seed {seed}"
            );
            assert!(direct.best_run().value >= bound - 1e-9, "seed {seed}");
            assert!(
                fw.best_outcome().result.value >= direct.best_run().value - 1e-9,
                "seed {seed}: framework {} below direct {}",
                fw.best_outcome().result.value,
                direct.best_run().value
            );
        }
    }

    #[test]
    fn framework_markov_fixture_cardinality_two() {
        let model = gen_markov_4item();
        let result = run_framework(
            AlgorithmTag::Cardinality,
            &model,
            &Constraint::Cardinality(2),
            0.1,
            None,
        )
        .unwrap();
        let v = result.best_outcome().result.value;
        // Brute force over the monotonized objective at k = 2.
        let audit = AssortmentOracle::new(&model);
        let (_, opt) = brute_force_opt(&audit, &Constraint::Cardinality(2)).unwrap();
        assert!(v >= (1.0 - 0.1) * 0.5 * opt - 1e-9, "{v} vs opt {opt}");
    }

    #[test]
    fn piecewise_holds_on_markov_histories() {
        for seed in 0..5 {
            let model = gen_random_markov(5, 810 + seed);
            let result = run_framework(
                AlgorithmTag::Cardinality,
                &model,
                &Constraint::Cardinality(2),
                0.25,
                None,
            )
            .unwrap();
            for o in &result.outcomes {
                let audit = AssortmentOracle::new(&model);
                let witness = check_piecewise_order(&audit, &o.history).unwrap();
                assert!(witness.is_none(), "seed {seed}: {}", witness.unwrap());
            }
        }
    }

    #[test]
    fn piecewise_single_phase_reduces_to_order_check() {
        // A fabricated single-phase history over a strongly ordered
        // function: every subset is proper, so the check must pass.
        let model = gen_random_mnl(5, 42);
        let order = descending_price_order(crate::assortment::ChoiceModel::prices(&model));
        let history = PhaseHistory {
            n: 5,
            phases: vec![PhaseRecord {
                exposed: (0..5).collect(),
                picked: (0..3).collect(),
            }],
            never_exposed: ElemSet::new(),
            order: order.as_slice().to_vec(),
        };
        let audit = AssortmentOracle::new(&model);
        assert!(check_piecewise_order(&audit, &history).unwrap().is_none());
    }

    #[test]
    fn piecewise_detects_the_fixture_violation() {
        // Descending prices are not an order for the 4-product Markov
        // fixture; a single-phase history exposes exactly that triple.
        let model = gen_markov_4item();
        let history = PhaseHistory {
            n: 4,
            phases: vec![PhaseRecord {
                exposed: (0..4).collect(),
                picked: (0..4).collect(),
            }],
            never_exposed: ElemSet::new(),
            order: vec![0, 1, 2, 3],
        };
        let audit = AssortmentOracle::new(&model);
        let w = check_piecewise_order(&audit, &history)
            .unwrap()
            .expect("violation expected");
        assert_eq!(w.c, ElemSet::singleton(3));
        assert!(w.a.is_subset(&(0..3).collect()));
        // The reported triple re-evaluates to a violation.
        let fa = best_sub_value(&model, &w.a.union(&w.c)) - best_sub_value(&model, &w.a);
        let fb = best_sub_value(&model, &w.b.union(&w.c)) - best_sub_value(&model, &w.b);
        assert!(fa > fb + TOL);
    }

    #[test]
    fn pricing_expansion_through_matroid_framework() {
        use crate::assortment::{pricing_expansion, MarkovModel, PriceLadder};
        use crate::instances::gen_random_markov;

        // Three base products, two allowed prices each, pick at most two
        // priced products overall. The walk runs on the expanded universe.
        let ladder = PriceLadder::new(vec![6.0, 3.0]).unwrap();
        let expansion = pricing_expansion(3, &ladder, 2).unwrap();
        assert_eq!(expansion.items.len(), 6);

        for seed in 0..5 {
            let raw = gen_random_markov(6, 930 + seed);
            let (arrivals, outside) = raw.arrivals();
            let (transitions, exit) = raw.transitions();
            let model = MarkovModel::new(
                arrivals.to_vec(),
                outside,
                transitions.to_vec(),
                exit.to_vec(),
                expansion.prices.clone(),
            )
            .unwrap();

            let constraint = Constraint::Matroid(expansion.matroid.clone());
            let result =
                run_framework(AlgorithmTag::Matroid, &model, &constraint, 0.1, None).unwrap();
            let run = &result.best_outcome().result;
            assert!(
                expansion.matroid.is_independent(&run.solution),
                "seed {seed}: infeasible"
            );

            let audit = AssortmentOracle::new(&model);
            let (_, opt) =
                brute_force_opt(&audit, &Constraint::Matroid(expansion.matroid.clone())).unwrap();
            assert!(
                run.value >= 0.25 * opt - 1e-9,
                "seed {seed}: value {} below 0.25 * {opt}",
                run.value
            );
        }
    }

    #[test]
    fn mixture_objective_is_ordered_by_descending_price() {
        use crate::assortment::mixture_oracle;
        use crate::instances::gen_random_mnl;
        use crate::verify::check_strong_order;

        let prices: Vec<f64> = vec![9.0, 7.5, 5.0, 4.0, 2.5, 1.0];
        for seed in 0..3 {
            let types: Vec<MnlModel> = (0..3)
                .map(|t| {
                    let m = gen_random_mnl(6, 940 + 10 * seed + t);
                    MnlModel::new(m.weights().to_vec(), m.outside_weight(), prices.clone()).unwrap()
                })
                .collect();
            let mix = crate::assortment::MixtureMnl::new(vec![0.5, 0.3, 0.2], types).unwrap();
            let oracle = mixture_oracle(&mix);
            let order = descending_price_order(mix.prices());
            let w = check_strong_order(&oracle, &order).unwrap();
            assert!(w.is_none(), "seed {seed}: {}", w.unwrap());
        }
    }

    #[test]
    fn framework_held_set_grows_across_phases() {
        for seed in 0..5 {
            let model = gen_random_markov(6, 910 + seed);
            let result = run_framework(
                AlgorithmTag::Cardinality,
                &model,
                &Constraint::Cardinality(3),
                0.15,
                None,
            )
            .unwrap();
            for o in &result.outcomes {
                let mut cumulative = ElemSet::new();
                let mut discarded = ElemSet::new();
                for p in &o.history.phases {
                    // Elements picked in earlier phases stay held: the
                    // re-run on a grown ground set replays its own prefix.
                    assert!(p.picked.is_subset(&p.exposed));
                    // Parsed-and-rejected elements never come back.
                    assert!(
                        p.exposed.is_disjoint(&discarded),
                        "a discarded element re-entered"
                    );
                    discarded.union_with(&p.exposed.difference(&p.picked));
                    cumulative.union_with(&p.picked);
                }
                assert_eq!(
                    cumulative,
                    o.result.solution.union(&o.result.removed),
                    "picked sets disagree with the final held set"
                );
                assert!(discarded.is_disjoint(&o.result.solution));
            }
        }
    }
}
