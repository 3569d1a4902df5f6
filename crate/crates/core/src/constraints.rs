//! Feasibility structures: cardinality, budget/knapsack, and matroids.
//!
//! Matroids are exposed through a single independence oracle; ranks and
//! circuits are computed lazily from it. Independence queries are counted
//! the same way value-oracle queries are.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ground::ElemSet;
use crate::TOL;

/// Per-element budgets with a shared total; `feasible(S) ⇔ Σ b_i ≤ B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetConstraint {
    pub budgets: Vec<f64>,
    pub total: f64,
}

impl BudgetConstraint {
    pub fn new(budgets: Vec<f64>, total: f64) -> Result<Self, Error> {
        if total < 0.0 {
            return Err(Error::invalid("total budget must be nonnegative"));
        }
        if let Some(b) = budgets.iter().find(|b| **b < 0.0 || !b.is_finite()) {
            return Err(Error::invalid(format!(
                "element budgets must be nonnegative, got {b}"
            )));
        }
        Ok(BudgetConstraint { budgets, total })
    }

    /// Unit budgets with total `k`: the cardinality constraint as a budget.
    pub fn cardinality(n: usize, k: usize) -> Self {
        BudgetConstraint {
            budgets: vec![1.0; n],
            total: k as f64,
        }
    }

    pub fn n(&self) -> usize {
        self.budgets.len()
    }

    pub fn spent(&self, s: &ElemSet) -> f64 {
        s.iter().map(|e| self.budgets[e]).sum()
    }

    pub fn feasible(&self, s: &ElemSet) -> bool {
        self.spent(s) <= self.total + TOL
    }
}

/// The supported independence-oracle implementations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum MatroidKind {
    /// All sets of size at most `k`.
    Uniform { k: usize },
    /// At most `caps[b]` elements from each block; `block_of[e]` names the
    /// block of element `e`.
    Partition {
        block_of: Vec<usize>,
        caps: Vec<usize>,
    },
    /// Partition caps plus a global cardinality cap (a laminar family).
    PartitionWithCardinality {
        block_of: Vec<usize>,
        caps: Vec<usize>,
        k: usize,
    },
    /// Subsets of an explicit list of bases; test-sized.
    ExplicitBases { bases: Vec<Vec<usize>> },
}

/// A matroid given by an independence oracle, with the ground-set rank
/// cached at construction and a per-handle query counter.
#[derive(Debug)]
pub struct Matroid {
    n: usize,
    kind: MatroidKind,
    rank_full: usize,
    bases: Vec<ElemSet>,
    queries: Cell<u64>,
}

impl Clone for Matroid {
    fn clone(&self) -> Self {
        // A clone is a fresh handle: the query counter starts at zero.
        Matroid {
            n: self.n,
            kind: self.kind.clone(),
            rank_full: self.rank_full,
            bases: self.bases.clone(),
            queries: Cell::new(0),
        }
    }
}

impl Matroid {
    pub fn new(n: usize, kind: MatroidKind) -> Result<Self, Error> {
        match &kind {
            MatroidKind::Uniform { .. } => {}
            MatroidKind::Partition { block_of, caps }
            | MatroidKind::PartitionWithCardinality { block_of, caps, .. } => {
                if block_of.len() != n {
                    return Err(Error::invalid(format!(
                        "partition matroid names {} blocks for {} elements",
                        block_of.len(),
                        n
                    )));
                }
                if let Some(b) = block_of.iter().find(|b| **b >= caps.len()) {
                    return Err(Error::invalid(format!(
                        "block id {b} has no capacity entry"
                    )));
                }
            }
            MatroidKind::ExplicitBases { bases } => {
                audit_bases(n, bases)?;
            }
        }
        let bases = match &kind {
            MatroidKind::ExplicitBases { bases } => {
                bases.iter().map(|b| ElemSet::from_slice(b)).collect()
            }
            _ => Vec::new(),
        };
        let mut m = Matroid {
            n,
            kind,
            rank_full: 0,
            bases,
            queries: Cell::new(0),
        };
        m.rank_full = m.rank_uncounted(&(0..n).collect::<ElemSet>());
        Ok(m)
    }

    pub fn uniform(n: usize, k: usize) -> Self {
        Matroid::new(n, MatroidKind::Uniform { k }).expect("uniform matroid is always valid")
    }

    /// The free matroid: every subset independent.
    pub fn free(n: usize) -> Self {
        Matroid::uniform(n, n)
    }

    pub fn partition(n: usize, block_of: Vec<usize>, caps: Vec<usize>) -> Result<Self, Error> {
        Matroid::new(n, MatroidKind::Partition { block_of, caps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    /// Rank of the full ground set, cached at construction.
    pub fn rank_of_ground(&self) -> usize {
        self.rank_full
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    pub fn reset_queries(&self) {
        self.queries.set(0);
    }

    /// Counted independence query.
    pub fn is_independent(&self, s: &ElemSet) -> bool {
        self.queries.set(self.queries.get() + 1);
        self.raw_independent(s)
    }

    fn raw_independent(&self, s: &ElemSet) -> bool {
        match &self.kind {
            MatroidKind::Uniform { k } => s.len() <= *k,
            MatroidKind::Partition { block_of, caps } => block_caps_ok(s, block_of, caps),
            MatroidKind::PartitionWithCardinality { block_of, caps, k } => {
                s.len() <= *k && block_caps_ok(s, block_of, caps)
            }
            MatroidKind::ExplicitBases { .. } => self.bases.iter().any(|b| s.is_subset(b)),
        }
    }

    /// Size of a maximal independent subset of `s`, built greedily through
    /// the counted oracle.
    pub fn rank(&self, s: &ElemSet) -> usize {
        let mut held = ElemSet::new();
        for e in s.iter() {
            if self.is_independent(&held.with(e)) {
                held.insert(e);
            }
        }
        held.len()
    }

    fn rank_uncounted(&self, s: &ElemSet) -> usize {
        let mut held = ElemSet::new();
        for e in s.iter() {
            if self.raw_independent(&held.with(e)) {
                held.insert(e);
            }
        }
        held.len()
    }

    /// The unique circuit contained in `s + j`, computed as
    /// `{j} ∪ {i ∈ s : s + j − i independent}` with at most `|s|` counted
    /// independence queries.
    ///
    /// Panics if `s` is dependent or `s + j` is independent (contract
    /// violation); those assertions use uncounted queries.
    pub fn circuit(&self, s: &ElemSet, j: usize) -> ElemSet {
        let with_j = s.with(j);
        assert!(
            self.raw_independent(s),
            "circuit: base set must be independent"
        );
        assert!(
            !self.raw_independent(&with_j),
            "circuit: s + j must be dependent"
        );
        let mut c = ElemSet::singleton(j);
        for i in s.iter() {
            if self.is_independent(&with_j.without(i)) {
                c.insert(i);
            }
        }
        c
    }
}

fn block_caps_ok(s: &ElemSet, block_of: &[usize], caps: &[usize]) -> bool {
    let mut used = vec![0usize; caps.len()];
    for e in s.iter() {
        let b = block_of[e];
        used[b] += 1;
        if used[b] > caps[b] {
            return false;
        }
    }
    true
}

/// Validates an explicit basis family: equal cardinality and the basis
/// exchange axiom, checked exhaustively.
fn audit_bases(n: usize, bases: &[Vec<usize>]) -> Result<(), Error> {
    if bases.is_empty() {
        return Err(Error::invalid("explicit matroid needs at least one basis"));
    }
    let sets: Vec<ElemSet> = bases.iter().map(|b| ElemSet::from_slice(b)).collect();
    for (b, s) in bases.iter().zip(&sets) {
        if s.len() != b.len() {
            return Err(Error::invalid("basis lists a repeated element"));
        }
        if let Some(e) = s.iter().find(|&e| e >= n) {
            return Err(Error::invalid(format!("basis element {e} out of range")));
        }
        if s.len() != sets[0].len() {
            return Err(Error::invalid("bases must all have the same cardinality"));
        }
    }
    for b1 in &sets {
        for b2 in &sets {
            for x in b1.difference(b2).iter() {
                let ok = b2
                    .difference(b1)
                    .iter()
                    .any(|y| sets.contains(&b1.without(x).with(y)));
                if !ok {
                    return Err(Error::invalid(format!(
                        "basis family violates the exchange axiom at {b1:?}, {b2:?}, element {x}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A feasibility constraint, dispatched by kind.
#[derive(Clone, Debug)]
pub enum Constraint {
    Cardinality(usize),
    Budget(BudgetConstraint),
    Matroid(Matroid),
}

impl Constraint {
    pub fn feasible(&self, s: &ElemSet) -> bool {
        match self {
            Constraint::Cardinality(k) => s.len() <= *k,
            Constraint::Budget(bc) => bc.feasible(s),
            Constraint::Matroid(m) => m.is_independent(s),
        }
    }
}
