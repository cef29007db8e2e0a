//! Sparse linear combinations keyed by an ordered basis label.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::scalars::Scalar;

/// A finite linear combination `sum c_k * k` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sparse<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord> Default for Sparse<K> {
    fn default() -> Self {
        Sparse {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Sparse<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*{k:?}")?;
        }
        Ok(())
    }
}

impl<K: Ord + Clone> Sparse<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(key: K, coeff: Scalar) -> Self {
        let mut s = Self::new();
        s.add_term(key, coeff);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Option<&Scalar> {
        self.terms.get(key)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Scalar> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, Scalar> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), c * v);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), -v);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    /// Relabels every key, merging coefficients that collide.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> Sparse<K2> {
        let mut out = Sparse::new();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        Sparse {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn into_terms(self) -> BTreeMap<K, Scalar> {
        self.terms
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for Sparse<K> {
    fn from_iter<I: IntoIterator<Item = (K, Scalar)>>(iter: I) -> Self {
        let mut s = Sparse::new();
        for (k, c) in iter {
            s.add_term(k, c);
        }
        s
    }
}

impl<'a, K: Ord + Clone> IntoIterator for &'a Sparse<K> {
    type Item = (&'a K, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: Ord + Clone> Add for &Sparse<K> {
    type Output = Sparse<K>;
    fn add(self, rhs: &Sparse<K>) -> Sparse<K> {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl<K: Ord + Clone> Sub for &Sparse<K> {
    type Output = Sparse<K>;
    fn sub(self, rhs: &Sparse<K>) -> Sparse<K> {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl<K: Ord + Clone> Neg for &Sparse<K> {
    type Output = Sparse<K>;
    fn neg(self) -> Sparse<K> {
        Sparse {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::FieldSpec;

    #[test]
    fn cancellation_removes_terms() {
        let f = FieldSpec::prime(3).unwrap();
        let mut s = Sparse::monomial(1usize, f.from_i64(1));
        s.add_term(1, f.from_i64(2));
        assert!(s.is_zero());
        s.add_term(2, f.zero());
        assert!(s.is_zero());
    }

    #[test]
    fn map_keys_merges() {
        let f = FieldSpec::Rational;
        let s: Sparse<usize> = [(1, f.from_i64(2)), (2, f.from_i64(-2))].into_iter().collect();
        assert!(s.map_keys(|_| 0usize).is_zero());
    }
}
