//! Exhaustive desk-scale property checkers and brute-force optimum oracles.
//!
//! Every checker either certifies the property or returns a re-evaluable
//! [`Witness`]. Enumeration caps are hard guards: exceeding one is an input
//! error, never a silent truncation.

use crate::assortment::{maximal_unconstrained_opt, ChoiceModel};
use crate::constraints::Constraint;
use crate::error::Error;
use crate::ground::{ElemSet, Order};
use crate::oracle::ValueOracle;
use crate::TOL;

/// Cap for monotonicity and subadditivity checks.
pub const CAP_PAIRWISE: usize = 12;
/// Cap for submodular-order checks.
pub const CAP_ORDER: usize = 10;
/// Cap for substitutability checks.
pub const CAP_SUBSTITUTABLE: usize = 10;
/// Cap for compatibility checks (triple-exponential enumeration).
pub const CAP_COMPATIBLE: usize = 7;
/// Cap for brute-force optima under cardinality and budget constraints.
pub const CAP_BRUTE_FORCE: usize = 20;
/// Cap for brute-force optima under matroid constraints.
pub const CAP_BRUTE_FORCE_MATROID: usize = 16;

/// A reproducible property violation: re-evaluating the reported sets
/// exhibits slack beyond the tolerance.
#[derive(Clone, Debug)]
pub struct Witness {
    pub property: &'static str,
    pub a: ElemSet,
    pub b: ElemSet,
    pub c: ElemSet,
    pub slack: f64,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} violated by A = {:?}, B = {:?}, C = {:?} (slack {:.3e})",
            self.property, self.a, self.b, self.c, self.slack
        )
    }
}

fn cap_guard(what: &'static str, cap: usize, n: usize) -> Result<(), Error> {
    if n > cap {
        return Err(Error::CapExceeded { what, cap, n });
    }
    Ok(())
}

/// All function values as a table indexed by subset mask.
fn value_table(f: &dyn ValueOracle, n: usize) -> Vec<f64> {
    (0u64..1 << n)
        .map(|mask| f.eval(&ElemSet::from_mask(mask)))
        .collect()
}

/// Submasks of `mask` ordered by descending size, ascending mask; excludes
/// `mask` itself.
fn proper_submasks(mask: u64) -> Vec<u64> {
    let mut subs = Vec::with_capacity((1usize << mask.count_ones()).saturating_sub(1));
    let mut sub = mask;
    while sub > 0 {
        sub = (sub - 1) & mask;
        subs.push(sub);
        if sub == 0 {
            break;
        }
    }
    subs.sort_by_key(|s| (std::cmp::Reverse(s.count_ones()), *s));
    subs
}

/// Exhaustive monotonicity check over all nested pairs; `n ≤ 12`.
pub fn check_monotone(f: &dyn ValueOracle) -> Result<Option<Witness>, Error> {
    let n = f.n();
    cap_guard("monotonicity check", CAP_PAIRWISE, n)?;
    let table = value_table(f, n);
    for a in 0u64..1 << n {
        let mut b = a;
        while b > 0 {
            b = (b - 1) & a;
            if table[b as usize] > table[a as usize] + TOL {
                return Ok(Some(Witness {
                    property: "monotone",
                    a: ElemSet::from_mask(a),
                    b: ElemSet::from_mask(b),
                    c: ElemSet::new(),
                    slack: table[b as usize] - table[a as usize],
                }));
            }
            if b == 0 {
                break;
            }
        }
    }
    Ok(None)
}

/// Exhaustive subadditivity check over all pairs; `n ≤ 12`.
pub fn check_subadditive(f: &dyn ValueOracle) -> Result<Option<Witness>, Error> {
    let n = f.n();
    cap_guard("subadditivity check", CAP_PAIRWISE, n)?;
    let table = value_table(f, n);
    for a in 0u64..1 << n {
        for b in 0u64..1 << n {
            let union = table[(a | b) as usize];
            if table[a as usize] + table[b as usize] < union - TOL {
                return Ok(Some(Witness {
                    property: "subadditive",
                    a: ElemSet::from_mask(a),
                    b: ElemSet::from_mask(b),
                    c: ElemSet::new(),
                    slack: union - table[a as usize] - table[b as usize],
                }));
            }
        }
    }
    Ok(None)
}

/// Strong submodular-order check: `f(i | A) ≤ f(i | B)` for every
/// `B ⊆ A` and element `i` strictly right of `A`; single-element
/// augmentations suffice for the strong property. `n ≤ 10`.
pub fn check_strong_order(f: &dyn ValueOracle, order: &Order) -> Result<Option<Witness>, Error> {
    check_order_inner(f, order, false)
}

/// Weak submodular-order check: the strong check restricted to nested
/// pairs, where all of `A \ B` lies right of `B`. `n ≤ 10`.
pub fn check_weak_order(f: &dyn ValueOracle, order: &Order) -> Result<Option<Witness>, Error> {
    check_order_inner(f, order, true)
}

fn check_order_inner(
    f: &dyn ValueOracle,
    order: &Order,
    nested_only: bool,
) -> Result<Option<Witness>, Error> {
    let n = f.n();
    cap_guard("submodular-order check", CAP_ORDER, n)?;
    let table = value_table(f, n);
    let property = if nested_only {
        "weak-order"
    } else {
        "strong-order"
    };
    for a in 1u64..1 << n {
        let a_set = ElemSet::from_mask(a);
        let max_rank = a_set.iter().map(|e| order.rank(e)).max().unwrap();
        let right: Vec<usize> = (0..n)
            .filter(|&i| !a_set.contains(i) && order.rank(i) > max_rank)
            .collect();
        if right.is_empty() {
            continue;
        }
        let subs = proper_submasks(a);
        for &i in &right {
            let gain_a = table[(a | 1 << i) as usize] - table[a as usize];
            for &b in &subs {
                if nested_only && !pi_nested(b, a, order) {
                    continue;
                }
                let gain_b = table[(b | 1 << i) as usize] - table[b as usize];
                if gain_a > gain_b + TOL {
                    return Ok(Some(Witness {
                        property,
                        a: a_set,
                        b: ElemSet::from_mask(b),
                        c: ElemSet::singleton(i),
                        slack: gain_a - gain_b,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// `B ⊆ A` are nested when the leftmost element of `A \ B` sits right of
/// all of `B`.
fn pi_nested(b: u64, a: u64, order: &Order) -> bool {
    let diff = a & !b;
    if diff == 0 || b == 0 {
        return true;
    }
    let diff_set = ElemSet::from_mask(diff);
    let b_set = ElemSet::from_mask(b);
    let l_diff = diff_set.iter().map(|e| order.rank(e)).min().unwrap();
    let r_b = b_set.iter().map(|e| order.rank(e)).max().unwrap();
    l_diff > r_b
}

/// Exact maximum of `f` over feasible sets, by enumeration. The first
/// strictly better set in mask order is kept, so ties resolve
/// deterministically. Caps: `n ≤ 20` (cardinality, budget), `n ≤ 16`
/// (matroid).
pub fn brute_force_opt(
    f: &dyn ValueOracle,
    constraint: &Constraint,
) -> Result<(ElemSet, f64), Error> {
    let n = f.n();
    match constraint {
        Constraint::Matroid(_) => {
            cap_guard("brute-force optimum (matroid)", CAP_BRUTE_FORCE_MATROID, n)?
        }
        _ => cap_guard("brute-force optimum", CAP_BRUTE_FORCE, n)?,
    }
    let mut best = (ElemSet::new(), 0.0f64);
    for mask in 1u64..1 << n {
        if let Constraint::Cardinality(k) = constraint {
            if mask.count_ones() as usize > *k {
                continue;
            }
        }
        let s = ElemSet::from_mask(mask);
        if !constraint.feasible(&s) {
            continue;
        }
        let v = f.eval(&s);
        if v > best.1 + 1e-12 {
            best = (s, v);
        }
    }
    Ok(best)
}

/// An alternating, non-crossing block structure over a set, plus a
/// permutation of the odd blocks used by the bound it parameterizes.
#[derive(Clone, Debug)]
pub struct InterleavedPartition {
    /// Blocks `O_1..O_m` (may be empty).
    pub odd_blocks: Vec<ElemSet>,
    /// Blocks `E_1..E_m` (may be empty).
    pub even_blocks: Vec<ElemSet>,
    /// Permutation of `0..m` applied to the odd blocks.
    pub sigma: Vec<usize>,
}

impl InterleavedPartition {
    /// Checks alternation (nonempty blocks appear in traversal order and
    /// never cross) and that `sigma` is a permutation.
    pub fn validate(&self, order: &Order) -> Result<(), Error> {
        let m = self.odd_blocks.len();
        if self.even_blocks.len() != m {
            return Err(Error::invalid("odd and even block counts differ"));
        }
        if self.sigma.len() != m {
            return Err(Error::invalid("sigma must have one entry per odd block"));
        }
        let mut seen = vec![false; m];
        for &s in &self.sigma {
            if s >= m || seen[s] {
                return Err(Error::invalid("sigma is not a permutation"));
            }
            seen[s] = true;
        }
        let mut last_rank: Option<usize> = None;
        for i in 0..m {
            for block in [&self.odd_blocks[i], &self.even_blocks[i]] {
                if block.is_empty() {
                    continue;
                }
                let l = block.iter().map(|e| order.rank(e)).min().unwrap();
                let r = block.iter().map(|e| order.rank(e)).max().unwrap();
                if let Some(prev) = last_rank {
                    if l <= prev {
                        return Err(Error::invalid("blocks cross in the traversal order"));
                    }
                }
                last_rank = Some(r);
            }
        }
        Ok(())
    }

    fn union_all(&self) -> ElemSet {
        let mut u = ElemSet::new();
        for b in self.odd_blocks.iter().chain(&self.even_blocks) {
            u.union_with(b);
        }
        u
    }
}

/// Outcome of evaluating the interleaved-partition bound.
#[derive(Clone, Copy, Debug)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the interleaved upper bound
/// `f(A) ≤ f(E(m)) + Σ_ℓ f(O_ℓ | L_σ(ℓ) ∪ E(ℓ−1))` for a valid partition
/// of `a`. With the identity permutation the offset sets `L` are empty;
/// with the reversed permutation `L_σ(ℓ)` collects all earlier odd blocks.
pub fn check_interleaved_bound(
    f: &dyn ValueOracle,
    order: &Order,
    a: &ElemSet,
    part: &InterleavedPartition,
) -> Result<BoundCheck, Error> {
    part.validate(order)?;
    let union = part.union_all();
    let total: usize = part
        .odd_blocks
        .iter()
        .chain(&part.even_blocks)
        .map(|b| b.len())
        .sum();
    if &union != a || total != a.len() {
        return Err(Error::invalid("blocks must partition the target set"));
    }
    let m = part.odd_blocks.len();
    let lhs = f.eval(a);
    let mut even_prefix = ElemSet::new(); // E(ℓ-1)
    let mut rhs_sum = 0.0;
    for l in 0..m {
        if !part.odd_blocks[l].is_empty() {
            let mut ctx = even_prefix.clone();
            for j in 0..l {
                if part.sigma[j] >= part.sigma[l] {
                    ctx.union_with(&part.odd_blocks[j]);
                }
            }
            let with_block = ctx.union(&part.odd_blocks[l]);
            rhs_sum += f.eval(&with_block) - if ctx.is_empty() { 0.0 } else { f.eval(&ctx) };
        }
        even_prefix.union_with(&part.even_blocks[l]);
    }
    let rhs = (if even_prefix.is_empty() {
        0.0
    } else {
        f.eval(&even_prefix)
    }) + rhs_sum;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + TOL,
    })
}

/// Substitutability check: offering more never raises an incumbent
/// product's choice probability. Exhaustive over `(S, j, i)`; `n ≤ 10`.
pub fn check_substitutable(model: &dyn ChoiceModel) -> Result<Option<Witness>, Error> {
    let n = model.n_products();
    cap_guard("substitutability check", CAP_SUBSTITUTABLE, n)?;
    let mut probs: Vec<Vec<f64>> = Vec::with_capacity(1 << n);
    for mask in 0u64..1 << n {
        let s = ElemSet::from_mask(mask);
        probs.push((0..n).map(|i| model.choice_prob(i, &s)).collect());
    }
    for mask in 0u64..1 << n {
        let s = ElemSet::from_mask(mask);
        for j in 0..n {
            if s.contains(j) {
                continue;
            }
            let bigger = (mask | 1 << j) as usize;
            for i in s.iter() {
                if probs[bigger][i] > probs[mask as usize][i] + TOL {
                    return Ok(Some(Witness {
                        property: "substitutable",
                        a: s.clone(),
                        b: ElemSet::singleton(j),
                        c: ElemSet::singleton(i),
                        slack: probs[bigger][i] - probs[mask as usize][i],
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Compatibility check for a choice model, exactly as the two defining
/// revenue inequalities state it: with `S*` a maximal optimal unconstrained
/// assortment, (a) every sub-assortment of `S*` has nonnegative marginal
/// revenue against anything, and (b) marginal revenue of any `C` shrinks as
/// the nested base inside `S*` grows. Exhaustive; `n ≤ 7`.
///
/// Condition (b) is stronger than what actually holds for Markov or MNL
/// models: when a set `C` has negative marginal revenue, a larger base can
/// soften (raise) that negative marginal, so the literal inequality fails
/// on most random instances. [`check_compatibility_monotonized`] tests the
/// variant of (b) on the monotonized objective, which is the property the
/// phase framework rests on; that one holds.
pub fn check_compatibility(model: &dyn ChoiceModel) -> Result<Option<Witness>, Error> {
    let n = model.n_products();
    cap_guard("compatibility check", CAP_COMPATIBLE, n)?;
    let table: Vec<f64> = (0u64..1 << n)
        .map(|mask| model.revenue(&ElemSet::from_mask(mask)))
        .collect();
    compatibility_inner(model, &table, "compatible-nonnegative", "compatible-nested")
}

/// Compatibility with the nested-marginal condition taken on the
/// monotonized objective (value of the best sub-assortment) instead of raw
/// revenue: for `B ⊆ A ⊆ S*` and any `C`, the monotonized marginal of `C`
/// may not grow with the base. The nonnegativity condition stays on raw
/// revenue. Exhaustive; `n ≤ 7`.
pub fn check_compatibility_monotonized(model: &dyn ChoiceModel) -> Result<Option<Witness>, Error> {
    let n = model.n_products();
    cap_guard("compatibility check", CAP_COMPATIBLE, n)?;
    let table: Vec<f64> = (0u64..1 << n)
        .map(|mask| {
            model
                .unconstrained_opt(&ElemSet::from_mask(mask))
                .expect("unconstrained optimizer failed during compatibility check")
                .1
        })
        .collect();
    compatibility_inner(
        model,
        &table,
        "compatible-nonnegative",
        "compatible-nested-monotonized",
    )
}

fn compatibility_inner(
    model: &dyn ChoiceModel,
    nested_table: &[f64],
    nonneg_name: &'static str,
    nested_name: &'static str,
) -> Result<Option<Witness>, Error> {
    let n = model.n_products();
    let full: ElemSet = (0..n).collect();
    let (star, _) = maximal_unconstrained_opt(model, &full)?;
    let table: Vec<f64> = (0u64..1 << n)
        .map(|mask| model.revenue(&ElemSet::from_mask(mask)))
        .collect();
    let star_mask = star.to_mask();

    // Nonnegative marginals of sub-assortments of the maximal optimum.
    let mut a = star_mask;
    loop {
        for c in 0u64..1 << n {
            let gain = table[(a | c) as usize] - table[c as usize];
            if gain < -TOL {
                return Ok(Some(Witness {
                    property: nonneg_name,
                    a: ElemSet::from_mask(a),
                    b: ElemSet::new(),
                    c: ElemSet::from_mask(c),
                    slack: -gain,
                }));
            }
        }
        if a == 0 {
            break;
        }
        a = (a - 1) & star_mask;
    }

    // Marginals shrink as the nested base grows inside the optimum.
    let mut a = star_mask;
    loop {
        let mut b = a;
        loop {
            if b != a {
                for c in 0u64..1 << n {
                    let against_a = nested_table[(c | a) as usize] - nested_table[a as usize];
                    let against_b = nested_table[(c | b) as usize] - nested_table[b as usize];
                    if against_a > against_b + TOL {
                        return Ok(Some(Witness {
                            property: nested_name,
                            a: ElemSet::from_mask(a),
                            b: ElemSet::from_mask(b),
                            c: ElemSet::from_mask(c),
                            slack: against_a - against_b,
                        }));
                    }
                }
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & a;
        }
        if a == 0 {
            break;
        }
        a = (a - 1) & star_mask;
    }
    Ok(None)
}
