//! Ground sets, element sets, and traversal orders.
//!
//! Elements are dense ids `0..n`. [`ElemSet`] is a compact bitset sized for
//! desk-scale instances (a few hundred elements); [`Order`] is a permutation
//! of the ground set with O(1) rank lookup.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::Error;

const BITS: usize = 64;

/// A set of element ids, stored as a bitset.
///
/// Representation is normalized (no trailing zero words), so equality and
/// hashing are structural.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ElemSet {
    words: Vec<u64>,
    len: usize,
}

impl ElemSet {
    pub fn new() -> Self {
        ElemSet::default()
    }

    pub fn singleton(e: usize) -> Self {
        let mut s = ElemSet::new();
        s.insert(e);
        s
    }

    pub fn from_slice(elems: &[usize]) -> Self {
        elems.iter().copied().collect()
    }

    /// Builds the set `{e : mask bit e set}`. Only meaningful for ids < 64.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = ElemSet {
            words: if mask == 0 { Vec::new() } else { vec![mask] },
            len: mask.count_ones() as usize,
        };
        s.normalize();
        s
    }

    /// Bitmask of the set; panics if any element id is >= 64.
    pub fn to_mask(&self) -> u64 {
        assert!(self.words.len() <= 1, "set does not fit in a 64-bit mask");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        let w = e / BITS;
        w < self.words.len() && self.words[w] >> (e % BITS) & 1 == 1
    }

    /// Inserts `e`; returns true if it was not already present.
    pub fn insert(&mut self, e: usize) -> bool {
        let w = e / BITS;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let bit = 1u64 << (e % BITS);
        if self.words[w] & bit != 0 {
            return false;
        }
        self.words[w] |= bit;
        self.len += 1;
        true
    }

    /// Removes `e`; returns true if it was present.
    pub fn remove(&mut self, e: usize) -> bool {
        let w = e / BITS;
        let bit = 1u64 << (e % BITS);
        if w >= self.words.len() || self.words[w] & bit == 0 {
            return false;
        }
        self.words[w] &= !bit;
        self.len -= 1;
        self.normalize();
        true
    }

    pub fn with(&self, e: usize) -> Self {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    pub fn without(&self, e: usize) -> Self {
        let mut s = self.clone();
        s.remove(e);
        s
    }

    pub fn union(&self, other: &ElemSet) -> Self {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (w, ow) in self.words.iter_mut().zip(&other.words) {
            *w |= ow;
        }
        self.recount();
    }

    pub fn intersection(&self, other: &ElemSet) -> Self {
        let mut s = self.clone();
        for (i, w) in s.words.iter_mut().enumerate() {
            *w &= other.words.get(i).copied().unwrap_or(0);
        }
        s.normalize();
        s.recount();
        s
    }

    pub fn difference(&self, other: &ElemSet) -> Self {
        let mut s = self.clone();
        for (i, w) in s.words.iter_mut().enumerate() {
            *w &= !other.words.get(i).copied().unwrap_or(0);
        }
        s.normalize();
        s.recount();
        s
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &ElemSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// Elements in increasing id order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..BITS)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| wi * BITS + b)
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Lexicographic comparison of the sorted element sequences; the empty
    /// set precedes every other set.
    pub fn lex_cmp(&self, other: &ElemSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    fn recount(&mut self) {
        self.len = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = ElemSet::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A ground set of `n` elements with dense ids `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Self {
        GroundSet { n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn full_set(&self) -> ElemSet {
        (0..self.n).collect()
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.n
    }
}

/// A permutation of the ground set with O(1) rank lookup.
///
/// `perm[i]` is the element parsed at position `i`; `rank[e]` is the inverse
/// map. Algorithms traverse elements in increasing rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Order {
    perm: Vec<usize>,
    rank: Vec<usize>,
}

impl Order {
    /// Builds an order from an explicit permutation of `0..perm.len()`.
    pub fn new(perm: Vec<usize>) -> Result<Self, Error> {
        let n = perm.len();
        let mut rank = vec![usize::MAX; n];
        for (i, &e) in perm.iter().enumerate() {
            if e >= n {
                return Err(Error::invalid(format!(
                    "order entry {e} out of range for n = {n}"
                )));
            }
            if rank[e] != usize::MAX {
                return Err(Error::invalid(format!("order repeats element {e}")));
            }
            rank[e] = i;
        }
        Ok(Order { perm, rank })
    }

    pub fn identity(n: usize) -> Self {
        Order {
            perm: (0..n).collect(),
            rank: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Position of element `e` in the traversal.
    pub fn rank(&self, e: usize) -> usize {
        self.rank[e]
    }

    /// Element at position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// The parse sequence.
    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// Element of `s` with maximal rank. Panics if `s` is empty.
    pub fn rightmost(&self, s: &ElemSet) -> usize {
        s.iter()
            .max_by_key(|&e| self.rank[e])
            .expect("rightmost of empty set")
    }

    /// Element of `s` with minimal rank. Panics if `s` is empty.
    pub fn leftmost(&self, s: &ElemSet) -> usize {
        s.iter()
            .min_by_key(|&e| self.rank[e])
            .expect("leftmost of empty set")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_basic_ops() {
        let mut s = ElemSet::from_slice(&[3, 1, 70]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(70) && s.contains(1) && !s.contains(2));
        assert_eq!(s.to_vec(), vec![1, 3, 70]);
        assert!(s.remove(70));
        assert!(!s.remove(70));
        assert_eq!(s, ElemSet::from_slice(&[1, 3]));
        assert_eq!(s.to_mask(), 0b1010);
        s.insert(0);
        assert_eq!(ElemSet::from_mask(0b1011), s);
    }

    #[test]
    fn set_algebra() {
        let a = ElemSet::from_slice(&[0, 2, 5]);
        let b = ElemSet::from_slice(&[2, 3]);
        assert_eq!(a.union(&b).to_vec(), vec![0, 2, 3, 5]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 5]);
        assert!(ElemSet::from_slice(&[2, 5]).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(a.is_disjoint(&ElemSet::from_slice(&[1, 4])));
    }

    #[test]
    fn lex_order_prefers_empty_then_early_elements() {
        use std::cmp::Ordering::*;
        let empty = ElemSet::new();
        assert_eq!(empty.lex_cmp(&ElemSet::singleton(0)), Less);
        assert_eq!(
            ElemSet::from_slice(&[0, 2]).lex_cmp(&ElemSet::singleton(1)),
            Less
        );
        assert_eq!(
            ElemSet::from_slice(&[0, 1]).lex_cmp(&ElemSet::from_slice(&[0, 2])),
            Less
        );
    }

    #[test]
    fn order_rank_inverse() {
        let ord = Order::new(vec![2, 0, 1]).unwrap();
        for i in 0..3 {
            assert_eq!(ord.rank(ord.at(i)), i);
        }
        assert!(Order::new(vec![0, 0, 1]).is_err());
        assert!(Order::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn rightmost_leftmost_examples() {
        // perm = (2,0,1): element 2 is leftmost overall.
        let ord = Order::new(vec![2, 0, 1]).unwrap();
        let s = ElemSet::from_slice(&[0, 1]);
        assert_eq!(ord.rightmost(&s), 1);
        assert_eq!(ord.leftmost(&s), 0);

        let single = ElemSet::singleton(2);
        assert_eq!(ord.rightmost(&single), 2);
        assert_eq!(ord.leftmost(&single), 2);

        let id5 = Order::identity(5);
        assert_eq!(id5.rightmost(&ElemSet::from_slice(&[1, 3])), 3);
    }

    #[test]
    #[should_panic(expected = "rightmost of empty set")]
    fn rightmost_empty_panics() {
        Order::identity(3).rightmost(&ElemSet::new());
    }
}
