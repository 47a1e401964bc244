//! Sparse vectors over F_p indexed by basis position within one degree.

use std::collections::BTreeMap;

use crate::fp::Prime;
use crate::graded::GradedSpace;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec(BTreeMap<usize, u32>);

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn basis(idx: usize) -> Self {
        SparseVec(BTreeMap::from([(idx, 1)]))
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, i64)>>(pairs: I, p: Prime) -> Self {
        let mut v = SparseVec::zero();
        for (i, c) in pairs {
            v.add_term(i, p.reduce(c), p);
        }
        v
    }

    pub fn from_dense(coords: &[u32]) -> Self {
        SparseVec(coords.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect())
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut out = vec![0; n];
        for (&i, &c) in &self.0 {
            out[i] = c;
        }
        out
    }

    /// Embeds block coordinates of block `(deg, w)` into degree coordinates.
    pub fn from_block(space: &GradedSpace, deg: i32, w: i32, coords: &[u32], _p: Prime) -> Self {
        let positions = space.block(deg, w);
        SparseVec(positions.iter().zip(coords).filter(|(_, &c)| c != 0).map(|(&i, &c)| (i, c)).collect())
    }

    /// Splits into dense block coordinates, one entry per internal degree present.
    pub fn to_blocks(&self, space: &GradedSpace, deg: i32) -> Vec<(i32, Vec<u32>)> {
        let mut out: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
        for (&i, &c) in &self.0 {
            let (w, j) = space.locate(deg, i);
            out.entry(w).or_insert_with(|| vec![0; space.block_dim(deg, w)])[j] = c;
        }
        out.into_iter().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, idx: usize) -> u32 {
        self.0.get(&idx).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &u32)> {
        self.0.iter()
    }

    pub fn add_term(&mut self, idx: usize, c: u32, p: Prime) {
        if c == 0 {
            return;
        }
        let e = self.0.entry(idx).or_insert(0);
        *e = p.add(*e, c);
        if *e == 0 {
            self.0.remove(&idx);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &SparseVec, c: u32, p: Prime) {
        if c == 0 {
            return;
        }
        for (&i, &v) in &other.0 {
            self.add_term(i, p.mul(v, c), p);
        }
    }

    pub fn scaled(&self, c: u32, p: Prime) -> SparseVec {
        if c == 0 {
            return SparseVec::zero();
        }
        SparseVec(self.0.iter().map(|(&i, &v)| (i, p.mul(v, c))).collect())
    }

    pub fn negated(&self, p: Prime) -> SparseVec {
        SparseVec(self.0.iter().map(|(&i, &v)| (i, p.neg(v))).collect())
    }
}

impl FromIterator<(usize, u32)> for SparseVec {
    fn from_iter<T: IntoIterator<Item = (usize, u32)>>(iter: T) -> Self {
        SparseVec(iter.into_iter().filter(|&(_, c)| c != 0).collect())
    }
}
