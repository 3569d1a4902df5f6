//! Value oracles: queryable set functions with exact query accounting.
//!
//! The query counter is the cost model every algorithm in this crate is
//! measured against, so the accounting is strict: one `eval` call is one
//! query. Algorithms cache the value of their running set rather than
//! re-querying it.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::ground::ElemSet;

/// A set function over a ground set of dense ids `0..n`.
///
/// Implementations must be normalized: `value(∅) = 0`.
pub trait SetFunction: Send + Sync {
    fn n(&self) -> usize;
    fn value(&self, s: &ElemSet) -> f64;
}

impl<F: SetFunction + ?Sized> SetFunction for &F {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn value(&self, s: &ElemSet) -> f64 {
        (**self).value(s)
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Box<F> {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn value(&self, s: &ElemSet) -> f64 {
        (**self).value(s)
    }
}

/// A queryable set function with a monotone query counter.
pub trait ValueOracle {
    fn n(&self) -> usize;

    /// Evaluates `f(s)` and increments the query counter.
    fn eval(&self, s: &ElemSet) -> f64;

    /// Number of evaluations performed so far.
    fn queries(&self) -> u64;
}

/// Marginal value `f(c | s) = f(c ∪ s) − f(s)`.
///
/// Costs two queries, or one when `s` is empty (normalization gives
/// `f(∅) = 0` for free). Algorithm loops do not use this helper: they cache
/// the value of their running set and pay one query per parsed element.
pub fn marginal(f: &dyn ValueOracle, c: &ElemSet, s: &ElemSet) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    if s.is_empty() {
        f.eval(c)
    } else {
        f.eval(&c.union(s)) - f.eval(s)
    }
}

/// Wraps a [`SetFunction`] in a query counter.
pub struct CountingOracle<F: SetFunction> {
    f: F,
    count: Cell<u64>,
}

impl<F: SetFunction> CountingOracle<F> {
    pub fn new(f: F) -> Self {
        CountingOracle {
            f,
            count: Cell::new(0),
        }
    }

    pub fn inner(&self) -> &F {
        &self.f
    }

    pub fn reset_queries(&self) {
        self.count.set(0);
    }
}

impl<F: SetFunction> ValueOracle for CountingOracle<F> {
    fn n(&self) -> usize {
        self.f.n()
    }

    fn eval(&self, s: &ElemSet) -> f64 {
        if let Some(e) = s.iter().find(|&e| e >= self.f.n()) {
            panic!(
                "element id {e} out of range for ground set of size {}",
                self.f.n()
            );
        }
        self.count.set(self.count.get() + 1);
        self.f.value(s)
    }

    fn queries(&self) -> u64 {
        self.count.get()
    }
}

/// A value oracle with multiplicative relative error `δ`.
///
/// The perturbation is a fixed function of the queried set (derived from the
/// seed and the set contents, and memoized), so the wrapper behaves as a
/// single deterministic function rather than as fresh noise per call:
/// `(1−δ)·f(S) ≤ eval(S) ≤ (1+δ)·f(S)`.
pub struct NoisyOracle<'a> {
    inner: &'a dyn ValueOracle,
    delta: f64,
    seed: u64,
    memo: RefCell<HashMap<ElemSet, f64>>,
}

/// Builds a [`NoisyOracle`]; requires `0 ≤ δ < 1`.
pub fn wrap_noisy(
    inner: &dyn ValueOracle,
    delta: f64,
    seed: u64,
) -> Result<NoisyOracle<'_>, Error> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "noise level must be in [0, 1), got {delta}"
        )));
    }
    Ok(NoisyOracle {
        inner,
        delta,
        seed,
        memo: RefCell::new(HashMap::new()),
    })
}

impl NoisyOracle<'_> {
    fn factor(&self, s: &ElemSet) -> f64 {
        if self.delta == 0.0 {
            return 1.0;
        }
        if let Some(&f) = self.memo.borrow().get(s) {
            return f;
        }
        // Stable per-set stream: seed the draw from (seed, set contents).
        let mut h = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for e in s.iter() {
            h = (h ^ e as u64).wrapping_mul(0x100_0000_01b3).rotate_left(17);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let f = 1.0 + self.delta * u;
        self.memo.borrow_mut().insert(s.clone(), f);
        f
    }
}

impl ValueOracle for NoisyOracle<'_> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn eval(&self, s: &ElemSet) -> f64 {
        self.inner.eval(s) * self.factor(s)
    }

    fn queries(&self) -> u64 {
        self.inner.queries()
    }
}

/// A modular function `f(S) = Σ_{i∈S} w_i`; test-sized building block.
#[derive(Clone, Debug)]
pub struct ModularFn {
    pub weights: Vec<f64>,
}

impl SetFunction for ModularFn {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, s: &ElemSet) -> f64 {
        s.iter().map(|e| self.weights[e]).sum()
    }
}

/// An explicit value table over all `2^n` subsets, `n ≤ 16`.
#[derive(Clone, Debug)]
pub struct ExplicitFn {
    n: usize,
    values: Vec<f64>,
}

impl ExplicitFn {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, Error> {
        if n > 16 {
            return Err(Error::invalid(format!(
                "explicit value tables support n <= 16, got {n}"
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::invalid(format!(
                "value table must have 2^{n} = {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        if values[0].abs() > crate::TOL {
            return Err(Error::invalid(
                "value table is not normalized: f(empty) != 0",
            ));
        }
        Ok(ExplicitFn { n, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl SetFunction for ExplicitFn {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, s: &ElemSet) -> f64 {
        self.values[s.to_mask() as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ElemSet;

    fn modular123() -> CountingOracle<ModularFn> {
        CountingOracle::new(ModularFn {
            weights: vec![1.0, 2.0, 3.0],
        })
    }

    #[test]
    fn marginal_modular() {
        let f = modular123();
        let got = marginal(&f, &ElemSet::singleton(2), &ElemSet::singleton(0));
        assert_eq!(got, 3.0);
        assert_eq!(f.queries(), 2);
    }

    #[test]
    fn marginal_of_empty_is_zero_and_free() {
        let f = modular123();
        assert_eq!(
            marginal(&f, &ElemSet::new(), &ElemSet::from_slice(&[0, 1])),
            0.0
        );
        assert_eq!(f.queries(), 0);
        // One query when the base set is empty.
        assert_eq!(marginal(&f, &ElemSet::singleton(1), &ElemSet::new()), 2.0);
        assert_eq!(f.queries(), 1);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_id_panics() {
        modular123().eval(&ElemSet::singleton(3));
    }

    #[test]
    fn noisy_zero_delta_is_exact() {
        let f = modular123();
        let noisy = wrap_noisy(&f, 0.0, 7).unwrap();
        let s = ElemSet::from_slice(&[0, 2]);
        assert_eq!(noisy.eval(&s), 4.0);
    }

    #[test]
    fn noisy_band_and_determinism() {
        let f = CountingOracle::new(ModularFn {
            weights: vec![10.0],
        });
        let noisy = wrap_noisy(&f, 0.01, 42).unwrap();
        let s = ElemSet::singleton(0);
        let v = noisy.eval(&s);
        assert!((9.9..=10.1).contains(&v), "{v} outside the noise band");
        for _ in 0..5 {
            assert_eq!(noisy.eval(&s), v);
        }
        // Same seed, fresh wrapper: same value.
        let noisy2 = wrap_noisy(&f, 0.01, 42).unwrap();
        assert_eq!(noisy2.eval(&s), v);
        assert!(wrap_noisy(&f, 1.0, 0).is_err());
    }

    #[test]
    fn explicit_fn_validation() {
        assert!(ExplicitFn::new(2, vec![0.0, 1.0, 1.0]).is_err());
        assert!(ExplicitFn::new(2, vec![0.5, 1.0, 1.0, 2.0]).is_err());
        let f = ExplicitFn::new(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap();
        assert_eq!(f.value(&ElemSet::from_slice(&[0, 1])), 1.5);
    }
}
