//! Finite-dimensional commutative monomial algebras over F_p.
//!
//! The basis consists of the monomials outside a monomial ideal of finite
//! colength, so the product of two basis monomials is either a basis monomial
//! or zero.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::sparse::SparseVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// The ideal `(X_1, ..., X_d)^N`: monomials of total degree `< N` survive.
    TotalDegree(u32),
    /// The ideal `(X_1^n, ..., X_d^n)`.
    VariablePower(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialAlgebra {
    p: Prime,
    nvars: usize,
    weights: Vec<i32>,
    truncation: Truncation,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    table: Vec<Option<u32>>,
}

impl MonomialAlgebra {
    pub fn new(p: Prime, nvars: usize, truncation: Truncation) -> Result<Self> {
        Self::with_weights(p, vec![1; nvars], truncation)
    }

    /// `weights[i]` is the internal degree of `X_i`.
    pub fn with_weights(p: Prime, weights: Vec<i32>, truncation: Truncation) -> Result<Self> {
        let nvars = weights.len();
        let bound = match truncation {
            Truncation::TotalDegree(n) | Truncation::VariablePower(n) => n,
        };
        if bound == 0 {
            return Err(Error::InvalidInput("the truncation kills the unit".into()));
        }
        let mut basis = Vec::new();
        let max_total = match truncation {
            Truncation::TotalDegree(n) => n - 1,
            Truncation::VariablePower(n) => (n - 1) * nvars as u32,
        };
        for total in 0..=max_total {
            let mut layer = Vec::new();
            compositions(total, nvars, &mut vec![0; nvars], 0, &mut layer);
            layer.retain(|e| match truncation {
                Truncation::TotalDegree(_) => true,
                Truncation::VariablePower(n) => e.iter().all(|&a| a < n),
            });
            basis.extend(layer);
        }
        let index: HashMap<Vec<u32>, usize> = basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let n = basis.len();
        let mut table = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                let prod: Vec<u32> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect();
                table[i * n + j] = index.get(&prod).map(|&k| k as u32);
            }
        }
        Ok(MonomialAlgebra { p, nvars, weights, truncation, basis, index, table })
    }

    /// The ground field as an algebra in zero variables.
    pub fn trivial(p: Prime) -> Self {
        Self::new(p, 0, Truncation::TotalDegree(1)).expect("nonzero truncation")
    }

    /// `F_p[X_1..X_d]/(X_1..X_d)^N`.
    pub fn truncated_polynomial(p: Prime, d: usize, n: u32) -> Result<Self> {
        Self::new(p, d, Truncation::TotalDegree(n))
    }

    /// `F_p[x]/(x^n)`.
    pub fn power_of_variable(p: Prime, n: u32) -> Result<Self> {
        Self::new(p, 1, Truncation::VariablePower(n))
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn unit(&self) -> usize {
        0
    }

    /// Index of `X_v`, if it survives the truncation.
    pub fn variable(&self, v: usize) -> Option<usize> {
        let mut e = vec![0; self.nvars];
        e[v] = 1;
        self.index_of(&e)
    }

    pub fn total_degree(&self, i: usize) -> u32 {
        self.basis[i].iter().sum()
    }

    /// Internal degree `Σ α_i w_i`.
    pub fn weight(&self, i: usize) -> i32 {
        self.basis[i].iter().zip(&self.weights).map(|(&a, &w)| a as i32 * w).sum()
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.table[i * self.dim() + j].map(|k| k as usize)
    }

    /// Augmentation: 1 on the unit, 0 on every positive monomial.
    pub fn augmentation(&self, i: usize) -> u32 {
        u32::from(i == 0)
    }

    pub fn multiply(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (&i, &x) in a.iter() {
            for (&j, &y) in b.iter() {
                if let Some(k) = self.product(i, j) {
                    out.add_term(k, self.p.mul(x, y), self.p);
                }
            }
        }
        out
    }

    pub fn label(&self, i: usize) -> String {
        monomial_label(&self.basis[i])
    }

    /// Smallest `k` with `m^k = 0` for the augmentation ideal `m`.
    pub fn nilpotency_index(&self) -> usize {
        let max_total = (0..self.dim()).map(|i| self.total_degree(i)).max().unwrap_or(0);
        max_total as usize + 1
    }
}

/// The symmetric algebra `S(V)` on `d` generators of internal degree 1, kept
/// up to total degree `cap`. Products of total degree above `cap` are dropped;
/// callers can detect this with [`GradedSymmetricAlgebra::overflows`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSymmetricAlgebra {
    algebra: MonomialAlgebra,
    cap: u32,
}

impl GradedSymmetricAlgebra {
    pub fn new(p: Prime, d: usize, cap: u32) -> Result<Self> {
        Ok(GradedSymmetricAlgebra { algebra: MonomialAlgebra::new(p, d, Truncation::TotalDegree(cap + 1))?, cap })
    }

    pub fn algebra(&self) -> &MonomialAlgebra {
        &self.algebra
    }

    pub fn into_algebra(self) -> MonomialAlgebra {
        self.algebra
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// True when the product is nonzero in `S(V)` but lies above the cap.
    pub fn overflows(&self, i: usize, j: usize) -> bool {
        self.algebra.total_degree(i) + self.algebra.total_degree(j) > self.cap
    }
}

pub fn monomial_label(exps: &[u32]) -> String {
    let factors: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(v, &a)| {
            let var = if exps.len() == 1 { "x".to_string() } else { format!("X{}", v + 1) };
            if a == 1 {
                var
            } else {
                format!("{var}^{a}")
            }
        })
        .collect();
    if factors.is_empty() {
        "1".into()
    } else {
        factors.join("*")
    }
}

// exponent vectors of the given total degree, in descending lexicographic order
fn compositions(total: u32, nvars: usize, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if nvars == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == nvars - 1 {
        cur[pos] = total;
        out.push(cur.clone());
        return;
    }
    for a in (0..=total).rev() {
        cur[pos] = a;
        compositions(total - a, nvars, cur, pos + 1, out);
    }
    cur[pos] = 0;
}
