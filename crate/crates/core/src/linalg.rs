//! Sparse Gaussian elimination over the coefficient field.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Entries below this modulus are treated as zero during float elimination.
const FLOAT_PIVOT_TOL: f64 = 1e-11;

fn negligible(c: &Scalar) -> bool {
    match c {
        Scalar::Exact(x) => x.is_zero(),
        Scalar::Float(z) => z.norm() < FLOAT_PIVOT_TOL,
    }
}

/// A sparse vector keyed by `K`.
pub type SparseVec<K> = BTreeMap<K, Scalar>;

#[derive(Clone, Debug)]
struct Row<K> {
    entries: SparseVec<K>,
    rhs: Scalar,
}

/// Row-echelon form of a growing set of vectors (with optional right-hand
/// sides). The pivot of a row is its smallest key, and each pivot row has
/// leading coefficient one.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    pivots: BTreeMap<K, Row<K>>,
    inconsistent: bool,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            pivots: BTreeMap::new(),
            inconsistent: false,
        }
    }
}

fn axpy<K: Ord + Clone>(dst: &mut SparseVec<K>, a: &Scalar, src: &SparseVec<K>) {
    for (k, v) in src {
        let delta = a * v;
        match dst.get_mut(k) {
            Some(e) => {
                let s = &*e + &delta;
                if negligible(&s) {
                    dst.remove(k);
                } else {
                    *e = s;
                }
            }
            None => {
                if !negligible(&delta) {
                    dst.insert(k.clone(), delta);
                }
            }
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// True once an equation `0 = c` with `c != 0` has been added.
    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    fn reduce(&self, row: &mut Row<K>) {
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => row.entries.keys().next().cloned(),
                Some(c) => row
                    .entries
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .next()
                    .map(|(k, _)| k.clone()),
            };
            let Some(k) = next else { break };
            if let Some(p) = self.pivots.get(&k) {
                let a = -&row.entries[&k];
                axpy(&mut row.entries, &a, &p.entries);
                row.rhs = &row.rhs + &(&a * &p.rhs);
                row.entries.remove(&k);
            }
            cursor = Some(k);
        }
    }

    /// Adds the equation `v · x = rhs`; returns whether it raised the rank.
    pub fn insert_equation(&mut self, v: SparseVec<K>, rhs: Scalar) -> bool {
        let mut row = Row { entries: v, rhs };
        row.entries.retain(|_, c| !negligible(c));
        self.reduce(&mut row);
        let Some((lead, c)) = row.entries.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            if !negligible(&row.rhs) {
                self.inconsistent = true;
            }
            return false;
        };
        let inv = c.inv().expect("nonzero pivot");
        let mut entries = SparseVec::new();
        for (k, v) in row.entries {
            entries.insert(k, &v * &inv);
        }
        entries.insert(lead.clone(), Scalar::one());
        let rhs = &row.rhs * &inv;
        self.pivots.insert(lead, Row { entries, rhs });
        true
    }

    /// Adds a vector to the spanned subspace; returns whether it was new.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        self.insert_equation(v, Scalar::zero())
    }

    /// Whether `v` lies in the span of the inserted vectors.
    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        let mut row = Row {
            entries: v.clone(),
            rhs: Scalar::zero(),
        };
        row.entries.retain(|_, c| !negligible(c));
        self.reduce(&mut row);
        row.entries.is_empty()
    }

    /// A solution of the inserted equations with free variables set to zero,
    /// or `None` if they are inconsistent.
    pub fn solve(&self) -> Option<BTreeMap<K, Scalar>> {
        if self.inconsistent {
            return None;
        }
        let mut x: BTreeMap<K, Scalar> = BTreeMap::new();
        for (k, row) in self.pivots.iter().rev() {
            let mut val = row.rhs.clone();
            for (j, c) in row.entries.range((std::ops::Bound::Excluded(k.clone()), std::ops::Bound::Unbounded)) {
                if let Some(xj) = x.get(j) {
                    val = &val - &(c * xj);
                }
            }
            if !val.is_zero() {
                x.insert(k.clone(), val);
            }
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(u32, i64)]) -> SparseVec<u32> {
        entries.iter().map(|&(k, c)| (k, Scalar::from_integer(c))).collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut e = Echelon::new();
        assert!(e.insert(v(&[(0, 1), (1, 2)])));
        assert!(e.insert(v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(v(&[(0, 1), (1, 3), (2, 1)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&v(&[(0, 2), (1, 4)])));
        assert!(!e.contains(&v(&[(2, 1)])));
    }

    #[test]
    fn solves_small_system() {
        // x0 + x1 = 3, x1 - x2 = 1, x0 + x2 = 2
        let mut e = Echelon::new();
        e.insert_equation(v(&[(0, 1), (1, 1)]), Scalar::from_integer(3));
        e.insert_equation(v(&[(1, 1), (2, -1)]), Scalar::from_integer(1));
        e.insert_equation(v(&[(0, 1), (2, 1)]), Scalar::from_integer(2));
        let x = e.solve().unwrap();
        let get = |k| x.get(&k).cloned().unwrap_or_else(Scalar::zero);
        assert_eq!(&get(0) + &get(1), Scalar::from_integer(3));
        assert_eq!(&get(1) - &get(2), Scalar::from_integer(1));
        assert_eq!(&get(0) + &get(2), Scalar::from_integer(2));
    }

    #[test]
    fn detects_inconsistency() {
        let mut e = Echelon::new();
        e.insert_equation(v(&[(0, 1)]), Scalar::from_integer(1));
        e.insert_equation(v(&[(0, 2)]), Scalar::from_integer(3));
        assert!(e.is_inconsistent());
        assert!(e.solve().is_none());
    }
}
