//! Dense linear algebra over a prime field F_p.
//!
//! Matrices act on column vectors: an `m x n` matrix is a map `F_p^n -> F_p^m`.
//! Entries are stored row-major as `u32` residues in `[0, p)`; products are
//! accumulated in `u64` so no intermediate ever overflows for `p < 2^31`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p >= (1 << 31) || !(2..).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    /// Primes accepted by the group-theoretic pipelines, which exclude p = 2.
    pub fn odd(p: u32) -> Result<Self> {
        let prime = Prime::new(p)?;
        if p == 2 {
            return Err(Error::EvenPrime(p));
        }
        Ok(prime)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "zero has no inverse");
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (self.0 as i64, a as i64);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        t.rem_euclid(self.0 as i64) as u32
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.0 as i64) as u32
    }

    /// `(-1)^e` as a residue.
    #[inline]
    pub fn sign(self, e: i64) -> u32 {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            self.0 - 1
        }
    }

    /// Symmetric representative in `(-p/2, p/2]`, used for readable output.
    pub fn signed(self, a: u32) -> i64 {
        if a > self.0 / 2 {
            a as i64 - self.0 as i64
        } else {
            a as i64
        }
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single element of F_p carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: Prime,
}

impl FpScalar {
    pub fn new(value: i64, p: Prime) -> Self {
        FpScalar { value: p.reduce(value), p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn prime(self) -> Prime {
        self.p
    }

    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| FpScalar { value: self.p.inv(self.value), p: self.p })
    }

    fn check(self, other: Self) {
        assert_eq!(self.p, other.p, "scalars from different fields");
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        FpScalar { value: self.p.add(self.value, rhs.value), p: self.p }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        FpScalar { value: self.p.sub(self.value, rhs.value), p: self.p }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        FpScalar { value: self.p.mul(self.value, rhs.value), p: self.p }
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        FpScalar { value: self.p.neg(self.value), p: self.p }
    }
}

/// Output of [`FpMatrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowEchelon {
    pub reduced: FpMatrix,
    pub pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    p: Prime,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix {}x{} over F_{}", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, p: Prime) -> Self {
        FpMatrix { rows, cols, p, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, p: Prime) -> Self {
        let mut m = FpMatrix::zeros(n, n, p);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing mod p.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], cols: usize, p: Prime) -> Result<Self> {
        let mut m = FpMatrix::zeros(rows.len(), cols, p);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::ShapeMismatch(format!("row {r} has {} entries, expected {cols}", row.len())));
            }
            for (c, &v) in row.iter().enumerate() {
                m.data[r * cols + c] = p.reduce(v);
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<u32>], rows: usize, p: Prime) -> Self {
        let mut m = FpMatrix::zeros(rows, columns.len(), p);
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, &v) in col.iter().enumerate() {
                m.data[r * m.cols + c] = v;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.p.value());
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: u32) {
        let i = r * self.cols + c;
        self.data[i] = self.p.add(self.data[i], v);
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.cols, self.rows, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    fn same_field(&self, other: &FpMatrix) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p.value(), other.p.value()));
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // the cost is about nnz(left) * cols(right); pick the cheaper side
        let nnz = |m: &FpMatrix| m.data.iter().filter(|&&x| x != 0).count();
        if nnz(other) * self.rows < nnz(self) * other.cols {
            return Ok(other.transpose().mul_rows(&self.transpose()).transpose());
        }
        Ok(self.mul_rows(other))
    }

    fn mul_rows(&self, other: &FpMatrix) -> FpMatrix {
        let p = self.p.value() as u64;
        let mut out = FpMatrix::zeros(self.rows, other.cols, self.p);
        let mut acc = vec![0u64; other.cols];
        // for p < 2^16 every product is below 2^32, so sums of up to 2^32 terms fit
        let lazy = p < 1 << 16 && self.cols < 1 << 31;
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                if lazy {
                    for (slot, &b) in acc.iter_mut().zip(orow) {
                        *slot += a * b as u64;
                    }
                } else {
                    for (slot, &b) in acc.iter_mut().zip(orow) {
                        *slot = (*slot + a * b as u64) % p;
                    }
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = (v % p) as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length does not match column count");
        let p = self.p.value() as u64;
        let support: Vec<(usize, u64)> = v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j, x as u64)).collect();
        let lazy = p < 1 << 16;
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut acc = 0u64;
                for &(j, b) in &support {
                    acc += row[j] as u64 * b;
                    if !lazy {
                        acc %= p;
                    }
                }
                (acc % p) as u32
            })
            .collect()
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("cannot add matrices of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.p.add(a, b)).collect();
        Ok(FpMatrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.add(&other.scale(self.p.neg(1)))
    }

    pub fn scale(&self, s: u32) -> FpMatrix {
        let data = self.data.iter().map(|&a| self.p.mul(a, s)).collect();
        FpMatrix { data, ..self.clone() }
    }

    /// Columns `range` of `self`.
    pub fn select_columns(&self, cols: &[usize]) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.rows, cols.len(), self.p);
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> FpMatrix {
        let mut out = FpMatrix::zeros(rows.len(), self.cols, self.p);
        for (i, &r) in rows.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    /// Reduced row echelon form. Pivots are strictly increasing column indices.
    pub fn rref(&self) -> RowEchelon {
        let mut m = self.clone();
        let pivots = m.reduce_in_place();
        RowEchelon { reduced: m, pivots }
    }

    fn reduce_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let pu = p.value() as u64;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..cols {
            if prow == self.rows {
                break;
            }
            let Some(found) = (prow..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if found != prow {
                for j in 0..cols {
                    self.data.swap(found * cols + j, prow * cols + j);
                }
            }
            let inv = p.inv(self.data[prow * cols + c]);
            if inv != 1 {
                for j in c..cols {
                    let i = prow * cols + j;
                    self.data[i] = p.mul(self.data[i], inv);
                }
            }
            let (before, rest) = self.data.split_at_mut(prow * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            let support: Vec<(usize, u64)> =
                (c..cols).filter(|&j| pivot_row[j] != 0).map(|j| (j, pivot_row[j] as u64)).collect();
            let eliminate = |row: &mut [u32]| {
                let f = row[c];
                if f == 0 {
                    return;
                }
                let nf = pu - f as u64;
                for &(j, b) in &support {
                    row[j] = ((row[j] as u64 + nf * b) % pu) as u32;
                }
            };
            before.chunks_mut(cols).for_each(eliminate);
            after.chunks_mut(cols).for_each(eliminate);
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of `{v : Mv = 0}`, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let ech = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1;
                for (r, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = p.neg(ech.reduced.get(r, free));
                }
                v
            })
            .collect()
    }

    /// Particular solution of `Mx = b` with every free variable set to zero.
    pub fn solve(&self, b: &[u32]) -> Result<Vec<u32>> {
        if b.len() != self.rows {
            return Err(Error::ShapeMismatch(format!("rhs has {} entries, expected {}", b.len(), self.rows)));
        }
        let mut aug = FpMatrix::zeros(self.rows, self.cols + 1, self.p);
        for r in 0..self.rows {
            aug.data[r * (self.cols + 1)..r * (self.cols + 1) + self.cols].copy_from_slice(self.row(r));
            aug.data[r * (self.cols + 1) + self.cols] = b[r];
        }
        let ech = aug.rref();
        if ech.pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in ech.pivots.iter().enumerate() {
            x[pc] = ech.reduced.get(r, self.cols);
        }
        Ok(x)
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = FpMatrix::zeros(n, 2 * n, self.p);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.data[r * 2 * n + n + r] = 1;
        }
        let pivots = aug.reduce_in_place();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(aug.select_columns(&cols))
    }
}

/// Rank of a list of vectors of common length `n`.
pub fn span_rank(vectors: &[Vec<u32>], n: usize, p: Prime) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    FpMatrix::from_columns(vectors, n, p).transpose().rank()
}

/// Incremental row-echelon basis, used to test whether a vector enlarges a span.
#[derive(Debug, Clone)]
pub struct SpanBuilder {
    p: Prime,
    n: usize,
    rows: Vec<(usize, Vec<u32>)>,
}

impl SpanBuilder {
    pub fn new(n: usize, p: Prime) -> Self {
        SpanBuilder { p, n, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn residue(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut w = v.to_vec();
        for (pc, row) in &self.rows {
            let f = w[*pc];
            if f != 0 {
                let nf = p.neg(f);
                for (a, &b) in w.iter_mut().zip(row) {
                    if b != 0 {
                        *a = p.add(*a, p.mul(nf, b));
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.residue(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent of the current span; returns whether it was added.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.n);
        let mut w = self.residue(v);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.p.inv(w[pc]);
        w.iter_mut().for_each(|x| *x = self.p.mul(*x, inv));
        // keep previous rows reduced in the new pivot column
        let p = self.p;
        for (_, row) in self.rows.iter_mut() {
            let f = row[pc];
            if f != 0 {
                let nf = p.neg(f);
                for (a, &b) in row.iter_mut().zip(&w) {
                    if b != 0 {
                        *a = p.add(*a, p.mul(nf, b));
                    }
                }
            }
        }
        self.rows.push((pc, w));
        true
    }
}

/// Extends the independent family `u` to a basis of F_p^n with standard basis
/// vectors: `e_j` is appended for every non-pivot column `j` of the row echelon
/// form of `u`, in increasing order. Returns only the added vectors.
pub fn complement(u: &[Vec<u32>], n: usize, p: Prime) -> Result<Vec<Vec<u32>>> {
    if let Some(bad) = u.iter().find(|v| v.len() != n) {
        return Err(Error::ShapeMismatch(format!("vector of length {} in F_p^{n}", bad.len())));
    }
    let pivots = if u.is_empty() {
        Vec::new()
    } else {
        FpMatrix::from_columns(u, n, p).transpose().rref().pivots
    };
    if pivots.len() < u.len() {
        return Err(Error::DependentInput);
    }
    let mut is_pivot = vec![false; n];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    Ok((0..n)
        .filter(|&j| !is_pivot[j])
        .map(|j| {
            let mut e = vec![0u32; n];
            e[j] = 1;
            e
        })
        .collect())
}

/// Like [`complement`], but scans an arbitrary candidate sequence.
pub fn extend_within<I>(u: &[Vec<u32>], candidates: I, n: usize, p: Prime) -> Result<Vec<Vec<u32>>>
where
    I: IntoIterator<Item = Vec<u32>>,
{
    let mut span = SpanBuilder::new(n, p);
    for v in u {
        if v.len() != n {
            return Err(Error::ShapeMismatch(format!("vector of length {} in F_p^{n}", v.len())));
        }
        if !span.insert(v) {
            return Err(Error::DependentInput);
        }
    }
    let mut added = Vec::new();
    for c in candidates {
        if span.dim() == n {
            break;
        }
        if span.insert(&c) {
            added.push(c);
        }
    }
    Ok(added)
}
