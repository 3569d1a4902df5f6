//! Instance generators and the on-disk instance format.
//!
//! Generators are deterministic under their seed. The file format is a
//! single self-describing JSON document with a `kind` discriminator plus
//! optional `constraint` and `order` blocks; explicit-function instances
//! store the full value table and are capped at 16 elements.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assortment::{ChoiceModel, MarkovModel, MixtureMnl, MnlModel};
use crate::constraints::{BudgetConstraint, Constraint, Matroid, MatroidKind};
use crate::error::Error;
use crate::ground::{ElemSet, Order};
use crate::oracle::{ExplicitFn, SetFunction};

/// The two-tier decoy instance on `2k+1` elements: `k` unit-value "good"
/// elements, `k` elements worth `eps` each, and one decoy worth `1 + eps`
/// that caps the good elements' joint contribution once taken.
///
/// Greedy grabs the decoy and ends with value `1 + k·eps`, while the good
/// block alone is worth `k`; the natural indexing is a submodular order.
#[derive(Clone, Debug)]
pub struct Example1Fn {
    k: usize,
    eps: f64,
}

impl Example1Fn {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn decoy(&self) -> usize {
        2 * self.k
    }
}

impl SetFunction for Example1Fn {
    fn n(&self) -> usize {
        2 * self.k + 1
    }

    fn value(&self, s: &ElemSet) -> f64 {
        let good = s.iter().filter(|&e| e < self.k).count() as f64;
        let poor = s.iter().filter(|&e| e >= self.k && e < 2 * self.k).count() as f64;
        if s.contains(self.decoy()) {
            good.max(1.0 + self.eps) + self.eps * poor
        } else {
            good + self.eps * poor
        }
    }
}

/// Builds the two-tier decoy instance with its natural order.
pub fn gen_example1(k: usize, eps_f: f64) -> Result<(Example1Fn, Order), Error> {
    if k < 2 {
        return Err(Error::invalid(format!("need k >= 2, got {k}")));
    }
    if !(0.0..1.0).contains(&eps_f) || eps_f == 0.0 {
        return Err(Error::invalid(format!("need 0 < eps_f < 1, got {eps_f}")));
    }
    let f = Example1Fn { k, eps: eps_f };
    let order = Order::identity(f.n());
    Ok((f, order))
}

/// The planted-set instance: a two-block ground set whose unique optimum
/// hides a random `k1`-subset of the first block. Value queries that miss
/// the planted set are statistically uninformative, yet the function is
/// monotone, subadditive, and strongly ordered with the first block first.
#[derive(Clone, Debug)]
pub struct HiddenSetFn {
    n1: usize,
    k1: usize,
    k2: usize,
    r: usize,
    alpha: f64,
    planted: ElemSet,
}

impl HiddenSetFn {
    pub fn planted(&self) -> &ElemSet {
        &self.planted
    }

    pub fn params(&self) -> (usize, usize, usize, usize) {
        (self.n1, self.k1, self.k2, self.r)
    }

    pub fn second_block(&self) -> ElemSet {
        (self.n1..self.n1 + self.k2).collect()
    }

    /// The unique optimum under cardinality `k1 + k2` and its value.
    pub fn optimum(&self) -> (ElemSet, f64) {
        let s = self.planted.union(&self.second_block());
        let v = 2.0 * self.k1 as f64 - self.r as f64;
        (s, v)
    }
}

impl SetFunction for HiddenSetFn {
    fn n(&self) -> usize {
        self.n1 + self.k2
    }

    fn value(&self, s: &ElemSet) -> f64 {
        let k1 = self.k1 as f64;
        let s1_len = s.iter().filter(|&e| e < self.n1).count();
        let s2_len = s.len() - s1_len;
        let first = (s1_len as f64).min(2.0 * k1);
        let overlap = s.intersection(&self.planted).len();
        let outside = s1_len - overlap;
        let dampen = outside as f64 + (overlap as f64).min(self.r as f64);
        let factor = (1.0 - (dampen / k1).min(1.0)).max(0.0);
        first + self.alpha * s2_len as f64 * factor
    }
}

/// Builds the planted-set instance; requires `n1 > k1 > k2 > 0` and
/// `r < k1`. The order places the first block before the second.
pub fn gen_hidden_set(
    n1: usize,
    k1: usize,
    k2: usize,
    r: usize,
    seed: u64,
) -> Result<(HiddenSetFn, Order), Error> {
    if !(n1 > k1 && k1 > k2 && k2 > 0) {
        return Err(Error::invalid(format!(
            "need n1 > k1 > k2 > 0, got ({n1}, {k1}, {k2})"
        )));
    }
    if r >= k1 {
        return Err(Error::invalid(format!(
            "need r < k1, got r = {r}, k1 = {k1}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<usize> = (0..n1).collect();
    ids.shuffle(&mut rng);
    let planted: ElemSet = ids[..k1].iter().copied().collect();
    let f = HiddenSetFn {
        n1,
        k1,
        k2,
        r,
        alpha: k1 as f64 / k2 as f64,
        planted,
    };
    let order = Order::identity(f.n());
    Ok((f, order))
}

/// A weighted coverage function: element `e` covers `covers[e]` in a ground
/// universe of weighted items; `f(S)` is the weight covered by `S`.
/// Monotone and submodular, so every traversal order is a submodular order.
#[derive(Clone, Debug)]
pub struct CoverageFn {
    covers: Vec<ElemSet>,
    weights: Vec<f64>,
}

impl CoverageFn {
    pub fn new(covers: Vec<ElemSet>, weights: Vec<f64>) -> Result<Self, Error> {
        if let Some(item) = covers
            .iter()
            .flat_map(|c| c.iter())
            .find(|&i| i >= weights.len())
        {
            return Err(Error::invalid(format!("covered item {item} has no weight")));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::invalid("item weights must be nonnegative"));
        }
        Ok(CoverageFn { covers, weights })
    }

    /// Dumps the full value table; only valid for `n ≤ 16`.
    pub fn to_explicit(&self) -> Result<ExplicitFn, Error> {
        let n = self.n();
        if n > 16 {
            return Err(Error::invalid(format!(
                "value table export supports n <= 16, got {n}"
            )));
        }
        let values = (0u64..1 << n)
            .map(|mask| self.value(&ElemSet::from_mask(mask)))
            .collect();
        ExplicitFn::new(n, values)
    }
}

impl SetFunction for CoverageFn {
    fn n(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, s: &ElemSet) -> f64 {
        let mut covered = ElemSet::new();
        for e in s.iter() {
            covered.union_with(&self.covers[e]);
        }
        covered.iter().map(|i| self.weights[i]).sum()
    }
}

/// Random coverage instance over a universe of `2n` weighted items.
pub fn gen_random_coverage(n: usize, seed: u64) -> CoverageFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(1));
    let universe = (2 * n).max(1);
    let weights: Vec<f64> = (0..universe).map(|_| rng.gen_range(0.25..1.0)).collect();
    let covers: Vec<ElemSet> = (0..n)
        .map(|_| {
            let mut c: ElemSet = (0..universe).filter(|_| rng.gen_bool(0.35)).collect();
            if c.is_empty() {
                c.insert(rng.gen_range(0..universe));
            }
            c
        })
        .collect();
    CoverageFn { covers, weights }
}

/// Random MNL model with distinct-ish prices in `[1, 10)`.
pub fn gen_random_mnl(n: usize, seed: u64) -> MnlModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x85eb_ca6b).wrapping_add(2));
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.2)).collect();
    let outside = rng.gen_range(0.3..1.0);
    let prices: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..10.0)).collect();
    MnlModel::new(weights, outside, prices).expect("generated MNL parameters are valid")
}

/// Random Markov model; every product keeps an exit probability of at
/// least 0.1, so no transient class is trapped.
pub fn gen_random_markov(n: usize, seed: u64) -> MarkovModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xc2b2_ae35).wrapping_add(3));
    let prices: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..10.0)).collect();

    let mut raw: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.05..1.0)).collect();
    raw[0] *= 0.5; // keep the outside arrival modest
    let total: f64 = raw.iter().sum();
    let arrival_outside = raw[0] / total;
    let arrivals: Vec<f64> = raw[1..].iter().map(|x| x / total).collect();

    let mut transitions = vec![vec![0.0; n]; n];
    let mut exit = vec![0.0; n];
    for i in 0..n {
        let mut row: Vec<f64> = (0..n)
            .map(|j| if j == i { 0.0 } else { rng.gen_range(0.0..1.0) })
            .collect();
        let e = rng.gen_range(0.1..0.6);
        let total: f64 = row.iter().sum::<f64>() + e;
        for x in row.iter_mut() {
            *x /= total;
        }
        exit[i] = e / total;
        transitions[i] = row;
    }
    MarkovModel::new(arrivals, arrival_outside, transitions, exit, prices)
        .expect("generated Markov parameters are valid")
}

/// Random integer budgets in 1..=3 with an integer total near 45% of their
/// sum (never below the largest single budget).
pub fn gen_random_budgets(n: usize, seed: u64) -> BudgetConstraint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x27d4_eb2f).wrapping_add(5));
    let budgets: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=3) as f64).collect();
    let total = (budgets.iter().sum::<f64>() * 0.45).ceil().max(3.0);
    BudgetConstraint::new(budgets, total).expect("generated budgets are valid")
}

/// Random small matroid: uniform on even seeds, partition on odd seeds.
pub fn gen_random_matroid(n: usize, seed: u64) -> Matroid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x1656_67b1).wrapping_add(6));
    if seed.is_multiple_of(2) {
        Matroid::uniform(n, rng.gen_range(2..=4))
    } else {
        let blocks = rng.gen_range(2..=3);
        let block_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
        let caps: Vec<usize> = (0..blocks).map(|_| rng.gen_range(1..=2)).collect();
        Matroid::partition(n, block_of, caps).expect("generated partition is valid")
    }
}

/// The 4-product Markov fixture: prices (8, 4, 4, 2), all arrivals at
/// product 1, uniform 1/3 transitions from product 1 to the other three,
/// immediate exit everywhere else.
pub fn gen_markov_4item() -> MarkovModel {
    let n = 4;
    let mut transitions = vec![vec![0.0; n]; n];
    let mut exit = vec![1.0; n];
    for j in [0usize, 2, 3] {
        transitions[1][j] = 1.0 / 3.0;
    }
    exit[1] = 0.0;
    MarkovModel::new(
        vec![0.0, 1.0, 0.0, 0.0],
        0.0,
        transitions,
        exit,
        vec![8.0, 4.0, 4.0, 2.0],
    )
    .expect("fixture parameters are valid")
}

/// One MNL customer type inside a mixture instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureTypeSpec {
    pub weights: Vec<f64>,
    pub outside: f64,
}

/// The self-describing instance payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceSpec {
    ExplicitFunction {
        n: usize,
        values: Vec<f64>,
    },
    Mnl {
        weights: Vec<f64>,
        outside: f64,
        prices: Vec<f64>,
    },
    Markov {
        arrivals: Vec<f64>,
        arrival_outside: f64,
        transitions: Vec<Vec<f64>>,
        exit: Vec<f64>,
        prices: Vec<f64>,
    },
    Mixture {
        alphas: Vec<f64>,
        prices: Vec<f64>,
        types: Vec<MixtureTypeSpec>,
    },
    HiddenSet {
        n1: usize,
        k1: usize,
        k2: usize,
        r: usize,
        seed: u64,
    },
    Example1 {
        k: usize,
        eps_f: f64,
    },
}

/// Optional feasibility block of an instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ConstraintSpec {
    Cardinality { k: usize },
    Budget { budgets: Vec<f64>, total: f64 },
    Matroid { matroid: MatroidKind },
}

/// An instance document: payload plus optional constraint and order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub spec: InstanceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

/// A validated, materialized instance.
#[derive(Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub kind: BuiltKind,
    pub constraint: Option<Constraint>,
    /// Explicit order declared in the file, if any.
    pub order: Option<Order>,
}

/// The materialized payload: either a plain set function or a choice model.
pub enum BuiltKind {
    Function(Box<dyn SetFunction>),
    Mnl(MnlModel),
    Markov(MarkovModel),
    Mixture(MixtureMnl),
}

impl std::fmt::Debug for BuiltKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuiltKind::Function(func) => write!(f, "Function(n = {})", func.n()),
            BuiltKind::Mnl(m) => m.fmt(f),
            BuiltKind::Markov(m) => m.fmt(f),
            BuiltKind::Mixture(m) => m.fmt(f),
        }
    }
}

impl Instance {
    pub fn n(&self) -> usize {
        match &self.kind {
            BuiltKind::Function(f) => f.n(),
            BuiltKind::Mnl(m) => m.n_products(),
            BuiltKind::Markov(m) => m.n_products(),
            BuiltKind::Mixture(m) => m.n_products(),
        }
    }

    pub fn is_choice_model(&self) -> bool {
        !matches!(self.kind, BuiltKind::Function(_))
    }
}

impl InstanceFile {
    /// Validates the document and materializes models and constraints.
    pub fn build(&self) -> Result<Instance, Error> {
        let kind = match &self.spec {
            InstanceSpec::ExplicitFunction { n, values } => {
                BuiltKind::Function(Box::new(ExplicitFn::new(*n, values.clone())?))
            }
            InstanceSpec::Mnl {
                weights,
                outside,
                prices,
            } => BuiltKind::Mnl(MnlModel::new(weights.clone(), *outside, prices.clone())?),
            InstanceSpec::Markov {
                arrivals,
                arrival_outside,
                transitions,
                exit,
                prices,
            } => BuiltKind::Markov(MarkovModel::new(
                arrivals.clone(),
                *arrival_outside,
                transitions.clone(),
                exit.clone(),
                prices.clone(),
            )?),
            InstanceSpec::Mixture {
                alphas,
                prices,
                types,
            } => {
                let types: Vec<MnlModel> = types
                    .iter()
                    .map(|t| MnlModel::new(t.weights.clone(), t.outside, prices.clone()))
                    .collect::<Result<_, _>>()?;
                BuiltKind::Mixture(MixtureMnl::new(alphas.clone(), types)?)
            }
            InstanceSpec::HiddenSet {
                n1,
                k1,
                k2,
                r,
                seed,
            } => {
                let (f, _) = gen_hidden_set(*n1, *k1, *k2, *r, *seed)?;
                BuiltKind::Function(Box::new(f))
            }
            InstanceSpec::Example1 { k, eps_f } => {
                let (f, _) = gen_example1(*k, *eps_f)?;
                BuiltKind::Function(Box::new(f))
            }
        };
        let n = match &kind {
            BuiltKind::Function(f) => f.n(),
            BuiltKind::Mnl(m) => m.n_products(),
            BuiltKind::Markov(m) => m.n_products(),
            BuiltKind::Mixture(m) => m.n_products(),
        };
        let constraint = match &self.constraint {
            None => None,
            Some(ConstraintSpec::Cardinality { k }) => Some(Constraint::Cardinality(*k)),
            Some(ConstraintSpec::Budget { budgets, total }) => {
                if budgets.len() != n {
                    return Err(Error::ModelValidation(format!(
                        "{} budgets for {} elements",
                        budgets.len(),
                        n
                    )));
                }
                Some(Constraint::Budget(BudgetConstraint::new(
                    budgets.clone(),
                    *total,
                )?))
            }
            Some(ConstraintSpec::Matroid { matroid }) => {
                Some(Constraint::Matroid(Matroid::new(n, matroid.clone())?))
            }
        };
        let order = match &self.order {
            None => None,
            Some(perm) => {
                if perm.len() != n {
                    return Err(Error::ModelValidation(format!(
                        "declared order has {} entries for {} elements",
                        perm.len(),
                        n
                    )));
                }
                Some(Order::new(perm.clone())?)
            }
        };
        Ok(Instance {
            file: self.clone(),
            kind,
            constraint,
            order,
        })
    }
}

/// Loads and validates an instance document.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, Error> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
    file.build()
}

/// Writes an instance document as pretty JSON.
pub fn save_instance(file: &InstanceFile, path: impl AsRef<Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(file)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    std::fs::write(path.as_ref(), text + "\n")
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))
}

/// Instance document for a Markov model.
pub fn markov_to_spec(m: &MarkovModel) -> InstanceSpec {
    let (arrivals, arrival_outside) = m.arrivals();
    let (transitions, exit) = m.transitions();
    InstanceSpec::Markov {
        arrivals: arrivals.to_vec(),
        arrival_outside,
        transitions: transitions.to_vec(),
        exit: exit.to_vec(),
        prices: crate::assortment::ChoiceModel::prices(m).to_vec(),
    }
}

/// Instance document for an MNL model.
pub fn mnl_to_spec(m: &MnlModel) -> InstanceSpec {
    InstanceSpec::Mnl {
        weights: m.weights().to_vec(),
        outside: m.outside_weight(),
        prices: crate::assortment::ChoiceModel::prices(m).to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assortment::{best_sub_value, ChoiceModel};
    use crate::oracle::ModularFn;

    #[test]
    fn example1_landmarks() {
        let (f, order) = gen_example1(5, 0.01).unwrap();
        assert_eq!(f.n(), 11);
        assert_eq!(order.as_slice(), (0..11).collect::<Vec<_>>().as_slice());
        assert!((f.value(&ElemSet::singleton(10)) - 1.01).abs() < 1e-12);
        let goods: ElemSet = (0..5).collect();
        assert!((f.value(&goods) - 5.0).abs() < 1e-12);
        // Mixed set with the decoy: good contribution is capped.
        let mut s = goods.clone();
        s.insert(10);
        assert!((f.value(&s) - 5.0).abs() < 1e-12);
        let decoy_plus_poor: ElemSet = [10, 5, 6].into_iter().collect();
        assert!((f.value(&decoy_plus_poor) - (1.01 + 0.02)).abs() < 1e-12);
        assert!(gen_example1(1, 0.01).is_err());
        assert!(gen_example1(3, 0.0).is_err());
    }

    #[test]
    fn hidden_set_landmarks() {
        let (f, order) = gen_hidden_set(6, 2, 1, 1, 7).unwrap();
        assert_eq!(f.n(), 7);
        assert_eq!(order.as_slice(), (0..7).collect::<Vec<_>>().as_slice());
        let (opt_set, opt_val) = f.optimum();
        assert!((f.value(&opt_set) - opt_val).abs() < 1e-12);
        assert!((opt_val - 3.0).abs() < 1e-12); // 2*k1 - r

        // Marginal of the whole second block against low-overlap first-block
        // sets: alpha * k2 * (1 - min(1, |S1|/k1)).
        let (n1, k1, k2, r) = f.params();
        let alpha = k1 as f64 / k2 as f64;
        let n2 = f.second_block();
        for s1_ids in [vec![], f.planted().to_vec()[..r].to_vec()] {
            let s1: ElemSet = s1_ids.iter().copied().collect();
            assert!(s1.intersection(f.planted()).len() <= r);
            let marginal = f.value(&s1.union(&n2)) - f.value(&s1);
            let expect = alpha * k2 as f64 * (1.0 - (s1.len() as f64 / k1 as f64).min(1.0));
            assert!((marginal - expect).abs() < 1e-12);
        }
        let _ = n1;

        assert!(gen_hidden_set(6, 2, 2, 1, 0).is_err()); // k1 == k2
        assert!(gen_hidden_set(6, 2, 1, 2, 0).is_err()); // r >= k1
    }

    #[test]
    fn hidden_set_planted_is_seed_deterministic() {
        let (a, _) = gen_hidden_set(20, 5, 2, 2, 42).unwrap();
        let (b, _) = gen_hidden_set(20, 5, 2, 2, 42).unwrap();
        let (c, _) = gen_hidden_set(20, 5, 2, 2, 43).unwrap();
        assert_eq!(a.planted(), b.planted());
        assert_ne!(a.planted(), c.planted());
    }

    #[test]
    fn coverage_disjoint_is_modular() {
        let covers = vec![
            ElemSet::from_slice(&[0]),
            ElemSet::from_slice(&[1, 2]),
            ElemSet::from_slice(&[3]),
        ];
        let weights = vec![1.0, 2.0, 0.5, 4.0];
        let cov = CoverageFn::new(covers, weights).unwrap();
        let modular = ModularFn {
            weights: vec![1.0, 2.5, 4.0],
        };
        for mask in 0u64..8 {
            let s = ElemSet::from_mask(mask);
            assert!((cov.value(&s) - modular.value(&s)).abs() < 1e-12);
        }
    }

    #[test]
    fn markov_4item_monotonized_fixture_value() {
        let m = gen_markov_4item();
        assert!((best_sub_value(&m, &ElemSet::from_slice(&[0, 1])) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn random_models_are_deterministic() {
        assert_eq!(gen_random_mnl(6, 9).prices(), gen_random_mnl(6, 9).prices());
        let a = gen_random_markov(5, 11);
        let b = gen_random_markov(5, 11);
        assert_eq!(a, b);
    }

    #[test]
    fn instance_round_trip() {
        let dir = std::env::temp_dir().join(format!("subord-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("markov4.json");
        let file = InstanceFile {
            spec: markov_to_spec(&gen_markov_4item()),
            constraint: Some(ConstraintSpec::Cardinality { k: 2 }),
            order: None,
        };
        save_instance(&file, &path).unwrap();
        let loaded = load_instance(&path).unwrap();
        assert_eq!(loaded.file, file);
        match loaded.kind {
            BuiltKind::Markov(m) => assert_eq!(m, gen_markov_4item()),
            _ => panic!("expected markov instance"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn missing_constraint_loads_unconstrained() {
        let file = InstanceFile {
            spec: mnl_to_spec(&gen_random_mnl(3, 0)),
            constraint: None,
            order: None,
        };
        let text = serde_json::to_string(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&text).unwrap();
        let built = parsed.build().unwrap();
        assert!(built.constraint.is_none());
        assert!(built.is_choice_model());
    }

    #[test]
    fn malformed_transition_row_names_the_row() {
        let mut spec = markov_to_spec(&gen_markov_4item());
        if let InstanceSpec::Markov { transitions, .. } = &mut spec {
            transitions[1][0] = 0.6; // row now sums past 1
        }
        let file = InstanceFile {
            spec,
            constraint: None,
            order: None,
        };
        let err = file.build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1"), "error should name the row: {msg}");
    }

    #[test]
    fn explicit_function_cap_enforced() {
        let file = InstanceFile {
            spec: InstanceSpec::ExplicitFunction {
                n: 17,
                values: vec![0.0; 1 << 17],
            },
            constraint: None,
            order: None,
        };
        assert!(file.build().is_err());
    }

    #[test]
    fn matroid_constraint_schema() {
        let file = InstanceFile {
            spec: mnl_to_spec(&gen_random_mnl(5, 0)),
            constraint: Some(ConstraintSpec::Matroid {
                matroid: MatroidKind::Partition {
                    block_of: vec![0, 0, 1, 1, 2],
                    caps: vec![1, 1, 1],
                },
            }),
            order: None,
        };
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"family\":\"partition\""), "{text}");
        let parsed: InstanceFile = serde_json::from_str(&text).unwrap();
        let built = parsed.build().unwrap();
        match built.constraint {
            Some(Constraint::Matroid(m)) => assert_eq!(m.rank_of_ground(), 3),
            other => panic!("expected a matroid constraint, got {other:?}"),
        }
    }

    #[test]
    fn kind_tags_are_stable() {
        let file = InstanceFile {
            spec: InstanceSpec::Example1 { k: 5, eps_f: 0.01 },
            constraint: Some(ConstraintSpec::Cardinality { k: 5 }),
            order: None,
        };
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"kind\":\"example1\""), "{text}");
        let file = InstanceFile {
            spec: InstanceSpec::HiddenSet {
                n1: 6,
                k1: 2,
                k2: 1,
                r: 1,
                seed: 0,
            },
            constraint: None,
            order: None,
        };
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"kind\":\"hidden-set\""), "{text}");
    }
}
