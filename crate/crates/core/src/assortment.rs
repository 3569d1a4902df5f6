//! Choice models and revenue objectives for assortment optimization.
//!
//! A choice model maps (product, offered set) to a selection probability;
//! the seller's expected revenue of an assortment `S` is
//! `R(S) = Σ_{i∈S} r_i · φ(i, S)`. Revenue is not monotone, so algorithms
//! consume the monotonized objective instead: the value of the best
//! sub-assortment of the queried set, exposed here as a [`ValueOracle`]
//! adapter.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constraints::{Matroid, MatroidKind};
use crate::error::Error;
use crate::ground::{ElemSet, Order};
use crate::oracle::ValueOracle;
use crate::TOL;

const VALUE_ITER_TOL: f64 = 1e-10;
const VALUE_ITER_CAP: usize = 100_000;

/// A substitutable random-choice model over products `0..n`.
pub trait ChoiceModel: Send + Sync {
    fn n_products(&self) -> usize;

    fn prices(&self) -> &[f64];

    /// Probability that a random customer chooses `i` from assortment `s`;
    /// zero for `i ∉ s`.
    fn choice_prob(&self, i: usize, s: &ElemSet) -> f64;

    /// Expected revenue of offering exactly `s`.
    fn revenue(&self, s: &ElemSet) -> f64;

    /// An optimal unconstrained assortment within `ground`, with a
    /// deterministic tie-break toward smaller sets. Returns `(set, value)`.
    fn unconstrained_opt(&self, ground: &ElemSet) -> Result<(ElemSet, f64), Error>;
}

/// Marginal revenue `R(c | s) = R(c ∪ s) − R(s)`. Can be negative.
pub fn revenue_marginal(model: &dyn ChoiceModel, c: &ElemSet, s: &ElemSet) -> f64 {
    model.revenue(&c.union(s)) - model.revenue(s)
}

/// Monotonized objective: the revenue of an optimal sub-assortment of `s`.
pub fn best_sub_value(model: &dyn ChoiceModel, s: &ElemSet) -> f64 {
    model
        .unconstrained_opt(s)
        .expect("unconstrained optimizer failed on a validated model")
        .1
}

/// Maximal optimal unconstrained assortment within `ground`: an optimal set
/// `S` with `R(i | S) < 0` for every `i ∉ S`. Found by exhaustive
/// enumeration (largest optimal set, ties toward the lexicographically
/// smallest); requires `|ground| ≤ 16`.
pub fn maximal_unconstrained_opt(
    model: &dyn ChoiceModel,
    ground: &ElemSet,
) -> Result<(ElemSet, f64), Error> {
    let ids = ground.to_vec();
    if ids.len() > 16 {
        return Err(Error::CapExceeded {
            what: "maximal unconstrained optimum",
            cap: 16,
            n: ids.len(),
        });
    }
    let mut best: Option<(ElemSet, f64)> = None;
    for mask in 0u64..(1 << ids.len()) {
        let s: ElemSet = ids
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let v = model.revenue(&s);
        let better = match &best {
            None => true,
            Some((bs, bv)) => {
                v > bv + TOL
                    || (v >= bv - TOL
                        && (s.len() > bs.len()
                            || (s.len() == bs.len() && s.lex_cmp(bs) == std::cmp::Ordering::Less)))
            }
        };
        if better {
            best = Some((s, v));
        }
    }
    Ok(best.unwrap_or((ElemSet::new(), 0.0)))
}

/// Multinomial-logit choice: selection probability proportional to the
/// preference weight among offered products plus the outside option.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MnlModel {
    weights: Vec<f64>,
    outside: f64,
    prices: Vec<f64>,
}

impl MnlModel {
    pub fn new(weights: Vec<f64>, outside: f64, prices: Vec<f64>) -> Result<Self, Error> {
        if weights.len() != prices.len() {
            return Err(Error::ModelValidation(format!(
                "{} weights for {} prices",
                weights.len(),
                prices.len()
            )));
        }
        if outside < 0.0 || weights.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::ModelValidation(
                "preference weights must be nonnegative".into(),
            ));
        }
        if prices.iter().any(|r| *r < 0.0 || !r.is_finite()) {
            return Err(Error::ModelValidation("prices must be nonnegative".into()));
        }
        if outside + weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::ModelValidation(
                "total preference weight must be positive".into(),
            ));
        }
        Ok(MnlModel {
            weights,
            outside,
            prices,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn outside_weight(&self) -> f64 {
        self.outside
    }
}

impl ChoiceModel for MnlModel {
    fn n_products(&self) -> usize {
        self.weights.len()
    }

    fn prices(&self) -> &[f64] {
        &self.prices
    }

    fn choice_prob(&self, i: usize, s: &ElemSet) -> f64 {
        if !s.contains(i) {
            return 0.0;
        }
        let denom = self.outside + s.iter().map(|e| self.weights[e]).sum::<f64>();
        if denom <= 0.0 {
            return 0.0;
        }
        self.weights[i] / denom
    }

    fn revenue(&self, s: &ElemSet) -> f64 {
        let denom = self.outside + s.iter().map(|e| self.weights[e]).sum::<f64>();
        if denom <= 0.0 {
            return 0.0;
        }
        s.iter()
            .map(|e| self.prices[e] * self.weights[e])
            .sum::<f64>()
            / denom
    }

    /// Sweeps the descending-price prefixes of `ground`; a prefix attains
    /// the unconstrained optimum under MNL choice. Ties break toward the
    /// shorter prefix.
    fn unconstrained_opt(&self, ground: &ElemSet) -> Result<(ElemSet, f64), Error> {
        let mut ids = ground.to_vec();
        ids.sort_by(|&a, &b| {
            self.prices[b]
                .partial_cmp(&self.prices[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut best = (ElemSet::new(), 0.0);
        let mut num = 0.0;
        let mut denom = self.outside;
        let mut prefix = ElemSet::new();
        for &e in &ids {
            num += self.prices[e] * self.weights[e];
            denom += self.weights[e];
            prefix.insert(e);
            let v = if denom > 0.0 { num / denom } else { 0.0 };
            if v > best.1 {
                best = (prefix.clone(), v);
            }
        }
        Ok(best)
    }
}

/// Markov chain choice: the customer arrives at a random product and walks
/// the transition matrix until reaching an offered product (their choice)
/// or the outside option.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovModel {
    arrivals: Vec<f64>,
    arrival_outside: f64,
    transitions: Vec<Vec<f64>>,
    exit: Vec<f64>,
    prices: Vec<f64>,
}

impl MarkovModel {
    pub fn new(
        arrivals: Vec<f64>,
        arrival_outside: f64,
        transitions: Vec<Vec<f64>>,
        exit: Vec<f64>,
        prices: Vec<f64>,
    ) -> Result<Self, Error> {
        let n = prices.len();
        if arrivals.len() != n || transitions.len() != n || exit.len() != n {
            return Err(Error::ModelValidation(format!(
                "inconsistent dimensions: {} prices, {} arrivals, {} transition rows, {} exit entries",
                n,
                arrivals.len(),
                transitions.len(),
                exit.len()
            )));
        }
        let nonneg = |xs: &[f64]| xs.iter().all(|x| *x >= -TOL && x.is_finite());
        if !nonneg(&arrivals) || arrival_outside < -TOL {
            return Err(Error::ModelValidation(
                "arrival probabilities must be nonnegative".into(),
            ));
        }
        let total_arrival = arrival_outside + arrivals.iter().sum::<f64>();
        if (total_arrival - 1.0).abs() > 1e-6 {
            return Err(Error::ModelValidation(format!(
                "arrival probabilities sum to {total_arrival}, expected 1"
            )));
        }
        for (i, row) in transitions.iter().enumerate() {
            if row.len() != n {
                return Err(Error::ModelValidation(format!(
                    "transition row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if !nonneg(row) || exit[i] < -TOL {
                return Err(Error::ModelValidation(format!(
                    "transition row {i} has a negative entry"
                )));
            }
            let total = exit[i] + row.iter().sum::<f64>();
            if (total - 1.0).abs() > 1e-6 {
                return Err(Error::ModelValidation(format!(
                    "transition row {i} sums to {total}, expected 1"
                )));
            }
        }
        if prices.iter().any(|r| *r < 0.0 || !r.is_finite()) {
            return Err(Error::ModelValidation("prices must be nonnegative".into()));
        }
        let model = MarkovModel {
            arrivals,
            arrival_outside,
            transitions,
            exit,
            prices,
        };
        model.check_exit_reachable()?;
        Ok(model)
    }

    /// Every product must reach the outside option through positive-prob
    /// transitions; otherwise some transient class has no exit and the walk
    /// under small assortments never terminates.
    fn check_exit_reachable(&self) -> Result<(), Error> {
        let n = self.prices.len();
        let mut reaches: Vec<bool> = self.exit.iter().map(|p| *p > TOL).collect();
        loop {
            let mut changed = false;
            for i in 0..n {
                if !reaches[i] && (0..n).any(|j| self.transitions[i][j] > TOL && reaches[j]) {
                    reaches[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        match reaches.iter().position(|r| !r) {
            Some(i) => Err(Error::ModelValidation(format!(
                "product {i} belongs to a transient class with no exit"
            ))),
            None => Ok(()),
        }
    }

    pub fn arrivals(&self) -> (&[f64], f64) {
        (&self.arrivals, self.arrival_outside)
    }

    pub fn transitions(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.transitions, &self.exit)
    }

    /// Absorption probabilities: entry `i` is the probability the walk ends
    /// with the customer choosing product `i ∈ s`. Treats `s ∪ {outside}`
    /// as absorbing and solves the transient linear system directly.
    pub fn absorption_probs(&self, s: &ElemSet) -> Vec<f64> {
        let n = self.prices.len();
        let transient: Vec<usize> = (0..n).filter(|i| !s.contains(*i)).collect();
        let t = transient.len();
        let mut probs = vec![0.0; n];
        for i in s.iter() {
            probs[i] = self.arrivals[i];
        }
        if t == 0 {
            return probs;
        }
        // (I - Q) h_i = column of transitions into product i, for each i in s.
        let mut a = DMatrix::<f64>::identity(t, t);
        for (ri, &i) in transient.iter().enumerate() {
            for (rj, &j) in transient.iter().enumerate() {
                a[(ri, rj)] -= self.transitions[i][j];
            }
        }
        let lu = a.lu();
        for target in s.iter() {
            let rhs = DVector::<f64>::from_iterator(
                t,
                transient.iter().map(|&i| self.transitions[i][target]),
            );
            let h = lu.solve(&rhs).unwrap_or_else(|| {
                panic!("singular transient block for assortment {s:?}; model validation should have rejected this")
            });
            for (&i, hi) in transient.iter().zip(h.iter()) {
                probs[target] += self.arrivals[i] * hi;
            }
        }
        probs
    }
}

impl ChoiceModel for MarkovModel {
    fn n_products(&self) -> usize {
        self.prices.len()
    }

    fn prices(&self) -> &[f64] {
        &self.prices
    }

    fn choice_prob(&self, i: usize, s: &ElemSet) -> f64 {
        if !s.contains(i) {
            return 0.0;
        }
        self.absorption_probs(s)[i]
    }

    fn revenue(&self, s: &ElemSet) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        self.absorption_probs(s)
            .iter()
            .zip(&self.prices)
            .map(|(p, r)| p * r)
            .sum()
    }

    /// Optimal stopping over the walk: offer a product wherever stopping
    /// beats the continuation value. Solved by value iteration on
    /// `g_i = max(r_i, Σ_j ρ_ij g_j)` for `i ∈ ground` (products outside
    /// `ground` can never be offered and only continue), then pruned to a
    /// minimal optimal assortment for a deterministic tie-break.
    fn unconstrained_opt(&self, ground: &ElemSet) -> Result<(ElemSet, f64), Error> {
        let n = self.prices.len();
        let mut g = vec![0.0f64; n];
        let mut iters = 0usize;
        loop {
            let mut delta = 0.0f64;
            for i in 0..n {
                let cont: f64 = (0..n).map(|j| self.transitions[i][j] * g[j]).sum();
                let gi = if ground.contains(i) {
                    self.prices[i].max(cont)
                } else {
                    cont
                };
                delta = delta.max((gi - g[i]).abs());
                g[i] = gi;
            }
            iters += 1;
            if delta <= VALUE_ITER_TOL {
                break;
            }
            if iters >= VALUE_ITER_CAP {
                return Err(Error::Numerical(format!(
                    "value iteration did not converge within {VALUE_ITER_CAP} sweeps (residual {delta:.3e})"
                )));
            }
        }
        let mut s: ElemSet = ground
            .iter()
            .filter(|&i| {
                let cont: f64 = (0..n).map(|j| self.transitions[i][j] * g[j]).sum();
                self.prices[i] + 1e-12 >= cont
            })
            .collect();
        let opt: f64 = self.arrivals.iter().zip(&g).map(|(l, gi)| l * gi).sum();
        // Drop elements whose removal keeps the optimum (descending id, to a
        // fixpoint); anchored to the Bellman value so error does not drift.
        loop {
            let removable = s
                .iter()
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .find(|&e| self.revenue(&s.without(e)) >= opt - 1e-11);
            match removable {
                Some(e) => {
                    s.remove(e);
                }
                None => break,
            }
        }
        let value = self.revenue(&s);
        Ok((s, value))
    }
}

/// A population of MNL customer types sharing one price vector; type `j`
/// arrives with probability `alphas[j]` and sees a customized assortment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureMnl {
    alphas: Vec<f64>,
    types: Vec<MnlModel>,
}

impl MixtureMnl {
    pub fn new(alphas: Vec<f64>, types: Vec<MnlModel>) -> Result<Self, Error> {
        if alphas.len() != types.len() || types.is_empty() {
            return Err(Error::ModelValidation(
                "one mixture weight per customer type required".into(),
            ));
        }
        if alphas.iter().any(|a| *a < 0.0) {
            return Err(Error::ModelValidation(
                "mixture weights must be nonnegative".into(),
            ));
        }
        let total: f64 = alphas.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::ModelValidation(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        let prices = types[0].prices();
        if types.iter().any(|t| t.prices() != prices) {
            return Err(Error::ModelValidation(
                "customer types must share one price vector (a common descending-price order)"
                    .into(),
            ));
        }
        Ok(MixtureMnl { alphas, types })
    }

    pub fn n_products(&self) -> usize {
        self.types[0].n_products()
    }

    pub fn prices(&self) -> &[f64] {
        self.types[0].prices()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn types(&self) -> &[MnlModel] {
        &self.types
    }

    /// Customized objective: each type is shown its own best sub-assortment
    /// of `s`, so the value is the mixture of per-type optima.
    pub fn value(&self, s: &ElemSet) -> f64 {
        self.alphas
            .iter()
            .zip(&self.types)
            .map(|(a, t)| a * best_sub_value(t, s))
            .sum()
    }
}

/// Descending-price traversal order; ties break toward the smaller id.
pub fn descending_price_order(prices: &[f64]) -> Order {
    let mut ids: Vec<usize> = (0..prices.len()).collect();
    ids.sort_by(|&a, &b| prices[b].partial_cmp(&prices[a]).unwrap().then(a.cmp(&b)));
    Order::new(ids).expect("sorted ids form a permutation")
}

/// Value oracle for the monotonized objective of one choice model.
///
/// Per-subset optima are memoized within the oracle's lifetime; memo hits do
/// not increment the query counter.
pub struct AssortmentOracle<'a> {
    model: &'a dyn ChoiceModel,
    memo: RefCell<HashMap<ElemSet, f64>>,
    count: Cell<u64>,
}

impl<'a> AssortmentOracle<'a> {
    pub fn new(model: &'a dyn ChoiceModel) -> Self {
        AssortmentOracle {
            model,
            memo: RefCell::new(HashMap::new()),
            count: Cell::new(0),
        }
    }
}

impl ValueOracle for AssortmentOracle<'_> {
    fn n(&self) -> usize {
        self.model.n_products()
    }

    fn eval(&self, s: &ElemSet) -> f64 {
        if let Some(&v) = self.memo.borrow().get(s) {
            return v;
        }
        self.count.set(self.count.get() + 1);
        let v = best_sub_value(self.model, s);
        self.memo.borrow_mut().insert(s.clone(), v);
        v
    }

    fn queries(&self) -> u64 {
        self.count.get()
    }
}

/// Value oracle for the customized mixture objective
/// `F(S) = Σ_j α_j · max_{X⊆S} R_j(X)`; the shared descending-price order
/// is a submodular order for `F`.
pub struct MixtureOracle<'a> {
    mix: &'a MixtureMnl,
    memo: RefCell<HashMap<ElemSet, f64>>,
    count: Cell<u64>,
}

/// Builds the oracle for a mixture's customized objective.
pub fn mixture_oracle(mix: &MixtureMnl) -> MixtureOracle<'_> {
    MixtureOracle {
        mix,
        memo: RefCell::new(HashMap::new()),
        count: Cell::new(0),
    }
}

impl ValueOracle for MixtureOracle<'_> {
    fn n(&self) -> usize {
        self.mix.n_products()
    }

    fn eval(&self, s: &ElemSet) -> f64 {
        if let Some(&v) = self.memo.borrow().get(s) {
            return v;
        }
        self.count.set(self.count.get() + 1);
        let v = self.mix.value(s);
        self.memo.borrow_mut().insert(s.clone(), v);
        v
    }

    fn queries(&self) -> u64 {
        self.count.get()
    }
}

/// A choice model given by an explicit probability table, one row per
/// assortment. Useful for adversarial fixtures (perturb a structured
/// model's probabilities and re-run the checkers); capped at 16 products.
#[derive(Clone, Debug)]
pub struct TabularChoiceModel {
    prices: Vec<f64>,
    probs: Vec<Vec<f64>>,
}

impl TabularChoiceModel {
    /// Tabulates an existing model's choice probabilities.
    pub fn from_model(model: &dyn ChoiceModel) -> Result<Self, Error> {
        let n = model.n_products();
        if n > 16 {
            return Err(Error::invalid(format!(
                "probability tables support n <= 16, got {n}"
            )));
        }
        let probs = (0u64..1 << n)
            .map(|mask| {
                let s = ElemSet::from_mask(mask);
                (0..n).map(|i| model.choice_prob(i, &s)).collect()
            })
            .collect();
        Ok(TabularChoiceModel {
            prices: model.prices().to_vec(),
            probs,
        })
    }

    /// Builds a table directly; `probs[mask][i]` is the probability of
    /// choosing `i` when the assortment is `mask`.
    pub fn new(prices: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self, Error> {
        let n = prices.len();
        if n > 16 {
            return Err(Error::invalid(format!(
                "probability tables support n <= 16, got {n}"
            )));
        }
        if probs.len() != 1 << n {
            return Err(Error::invalid(format!(
                "need 2^{n} probability rows, got {}",
                probs.len()
            )));
        }
        for (mask, row) in probs.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {mask} has {} entries",
                    row.len()
                )));
            }
            let mut total = 0.0;
            for (i, p) in row.iter().enumerate() {
                if *p < 0.0 || (*p > 0.0 && mask >> i & 1 == 0) {
                    return Err(Error::invalid(format!(
                        "row {mask}: product {i} has probability {p} but is not offered"
                    )));
                }
                total += p;
            }
            if total > 1.0 + TOL {
                return Err(Error::invalid(format!("row {mask} sums to {total} > 1")));
            }
        }
        Ok(TabularChoiceModel { prices, probs })
    }

    /// Overrides one probability entry.
    pub fn set_prob(&mut self, s: &ElemSet, i: usize, p: f64) {
        self.probs[s.to_mask() as usize][i] = p;
    }
}

impl ChoiceModel for TabularChoiceModel {
    fn n_products(&self) -> usize {
        self.prices.len()
    }

    fn prices(&self) -> &[f64] {
        &self.prices
    }

    fn choice_prob(&self, i: usize, s: &ElemSet) -> f64 {
        self.probs[s.to_mask() as usize][i]
    }

    fn revenue(&self, s: &ElemSet) -> f64 {
        let row = &self.probs[s.to_mask() as usize];
        s.iter().map(|i| self.prices[i] * row[i]).sum()
    }

    fn unconstrained_opt(&self, ground: &ElemSet) -> Result<(ElemSet, f64), Error> {
        let ids = ground.to_vec();
        let mut best = (ElemSet::new(), 0.0f64);
        for sub in 0u64..(1 << ids.len()) {
            let s: ElemSet = ids
                .iter()
                .enumerate()
                .filter(|(b, _)| sub >> b & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let v = self.revenue(&s);
            if v > best.1 + 1e-12 {
                best = (s, v);
            }
        }
        Ok(best)
    }
}

/// A finite set of allowed prices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceLadder {
    prices: Vec<f64>,
}

impl PriceLadder {
    pub fn new(prices: Vec<f64>) -> Result<Self, Error> {
        if prices.is_empty() {
            return Err(Error::invalid("price ladder must be nonempty"));
        }
        if prices.iter().any(|p| *p <= 0.0 || !p.is_finite()) {
            return Err(Error::invalid("ladder prices must be positive"));
        }
        for (i, p) in prices.iter().enumerate() {
            if prices[..i].iter().any(|q| (q - p).abs() <= TOL) {
                return Err(Error::invalid(format!("ladder price {p} is repeated")));
            }
        }
        Ok(PriceLadder { prices })
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Joint pricing reduction: one ground element per (product, price) pair.
#[derive(Clone, Debug)]
pub struct PricingExpansion {
    /// `(product, price)` for each expanded element, in id order.
    pub items: Vec<(usize, f64)>,
    /// Price of each expanded element.
    pub prices: Vec<f64>,
    /// At most one price per product, at most `k` products overall.
    pub matroid: Matroid,
}

/// Expands `n_products` against a price ladder and builds the feasibility
/// matroid for the joint pricing-and-assortment problem: a partition
/// constraint (one price per product) intersected with a cardinality cap,
/// which together form a laminar matroid.
pub fn pricing_expansion(
    n_products: usize,
    ladder: &PriceLadder,
    k: usize,
) -> Result<PricingExpansion, Error> {
    let m = ladder.len();
    let mut items = Vec::with_capacity(n_products * m);
    let mut prices = Vec::with_capacity(n_products * m);
    let mut block_of = Vec::with_capacity(n_products * m);
    for product in 0..n_products {
        for &price in ladder.prices() {
            items.push((product, price));
            prices.push(price);
            block_of.push(product);
        }
    }
    let matroid = Matroid::new(
        items.len(),
        MatroidKind::PartitionWithCardinality {
            block_of,
            caps: vec![1; n_products],
            k,
        },
    )?;
    Ok(PricingExpansion {
        items,
        prices,
        matroid,
    })
}
