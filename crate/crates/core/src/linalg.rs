//! Exact rank over ℚ by incremental sparse row echelon form.

use std::collections::BTreeMap;

use num::{BigRational, Zero};

/// A sparse vector: coordinate index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, BigRational>;

/// Vectors inserted so far, kept in echelon form keyed by leading index.
/// Every stored vector has leading coefficient 1.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce `v` against the basis; keep it if it is independent.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, mut v: SparseVec) -> bool {
        v.retain(|_, c| !c.is_zero());
        while let Some((&lead, coeff)) = v.iter().next() {
            let coeff = coeff.clone();
            match self.pivots.get(&lead) {
                Some(pivot) => {
                    for (k, c) in pivot {
                        let entry = v.entry(*k).or_insert_with(BigRational::zero);
                        *entry -= &coeff * c;
                        if entry.is_zero() {
                            v.remove(k);
                        }
                    }
                }
                None => {
                    for c in v.values_mut() {
                        *c /= &coeff;
                    }
                    self.pivots.insert(lead, v);
                    return true;
                }
            }
        }
        false
    }

    /// Insert the unit vector `e_k`.
    pub fn insert_unit(&mut self, k: usize) -> bool {
        // fast path: e_k is already a stored pivot
        if self.pivots.get(&k).is_some_and(|p| p.len() == 1) {
            return false;
        }
        let mut v = SparseVec::new();
        v.insert(k, BigRational::from_integer(1.into()));
        self.insert(v)
    }
}

/// Rank of a dense matrix, given as rows.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut ech = Echelon::new();
    for row in rows {
        let v: SparseVec = row
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
            .collect();
        ech.insert(v);
    }
    ech.rank()
}
