//! Fixed-universe state sets.

use smallvec::SmallVec;

/// A set of state indices. Sets of up to 128 states live inline.
///
/// All sets combined by an operation must come from the same universe size.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet {
    words: SmallVec<[u64; 2]>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl StateSet {
    pub fn empty(n: usize) -> StateSet {
        StateSet { words: SmallVec::from_elem(0, word_count(n)) }
    }

    pub fn full(n: usize) -> StateSet {
        let mut s = StateSet { words: SmallVec::from_elem(!0, word_count(n)) };
        s.trim(n);
        s
    }

    pub fn singleton(n: usize, i: usize) -> StateSet {
        let mut s = StateSet::empty(n);
        s.insert(i);
        s
    }

    pub fn from_indices(n: usize, items: impl IntoIterator<Item = usize>) -> StateSet {
        let mut s = StateSet::empty(n);
        for i in items {
            s.insert(i);
        }
        s
    }

    /// Build from the low `n` bits of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> StateSet {
        let mut s = StateSet::empty(n);
        if n > 0 {
            s.words[0] = bits;
            s.trim(n);
        }
        s
    }

    fn trim(&mut self, n: usize) {
        let rem = n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self, n: usize) -> StateSet {
        let mut s = StateSet { words: self.words.iter().map(|w| !w).collect() };
        s.trim(n);
        s
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    fn zip(&self, other: &StateSet, op: impl Fn(u64, u64) -> u64) -> StateSet {
        StateSet { words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect() }
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }
}

impl std::fmt::Debug for StateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_respects_universe() {
        let s = StateSet::from_indices(70, [0, 65]);
        let c = s.complement(70);
        assert_eq!(c.len(), 68);
        assert!(!c.contains(65));
        assert!(c.contains(69));
        assert!(!c.contains(70));
    }

    #[test]
    fn iter_in_order() {
        let s = StateSet::from_indices(200, [199, 3, 64, 127]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 64, 127, 199]);
        assert_eq!(s.first(), Some(3));
    }

    #[test]
    fn subset_and_ops() {
        let a = StateSet::from_indices(5, [1, 2]);
        let b = StateSet::from_indices(5, [1, 2, 4]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert_eq!(b.difference(&a), StateSet::singleton(5, 4));
        assert!(StateSet::empty(0).is_subset(&StateSet::empty(0)));
        assert_eq!(StateSet::full(5).len(), 5);
    }
}
