//! Graded vector spaces and cochain complexes with finite support.
//!
//! Every basis vector carries an internal degree (zero when the space is not
//! bigraded). Differentials preserve internal degree, so they are stored as
//! blocks `(degree, internal) -> (degree + 1, internal)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, Prime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    min_degree: i32,
    internal: Vec<Vec<i32>>,
    labels: Option<Vec<Vec<String>>>,
    bigraded: bool,
    // (internal degree, position inside its block) for each basis vector
    locate: Vec<Vec<(i32, usize)>>,
    blocks: Vec<BTreeMap<i32, Vec<usize>>>,
}

impl GradedSpace {
    /// A singly graded space with the given dimensions starting at `min_degree`.
    pub fn new(min_degree: i32, dims: &[usize]) -> Self {
        let internal = dims.iter().map(|&n| vec![0; n]).collect();
        Self::build(min_degree, internal, None, false)
    }

    /// A bigraded space: `internal[k][j]` is the internal degree of basis vector
    /// `j` in cohomological degree `min_degree + k`.
    pub fn bigraded(min_degree: i32, internal: Vec<Vec<i32>>) -> Self {
        Self::build(min_degree, internal, None, true)
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.internal.len() {
            return Err(Error::ShapeMismatch("one label list per degree required".into()));
        }
        for (k, (ls, dims)) in labels.iter().zip(&self.internal).enumerate() {
            if ls.len() != dims.len() {
                return Err(Error::ShapeMismatch(format!("degree {}: wrong label count", self.min_degree + k as i32)));
            }
            let mut seen = std::collections::BTreeSet::new();
            if let Some(dup) = ls.iter().find(|l| !seen.insert(*l)) {
                return Err(Error::InvalidInput(format!("duplicate basis label {dup:?}")));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    fn build(min_degree: i32, internal: Vec<Vec<i32>>, labels: Option<Vec<Vec<String>>>, bigraded: bool) -> Self {
        let mut locate = Vec::with_capacity(internal.len());
        let mut blocks = Vec::with_capacity(internal.len());
        for ws in &internal {
            let mut map: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
            let mut loc = Vec::with_capacity(ws.len());
            for (j, &w) in ws.iter().enumerate() {
                let entry = map.entry(w).or_default();
                loc.push((w, entry.len()));
                entry.push(j);
            }
            locate.push(loc);
            blocks.push(map);
        }
        GradedSpace { min_degree, internal, labels, bigraded, locate, blocks }
    }

    pub fn zero() -> Self {
        Self::new(0, &[])
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    /// One past the largest degree in the support window.
    pub fn end_degree(&self) -> i32 {
        self.min_degree + self.internal.len() as i32
    }

    pub fn degrees(&self) -> std::ops::Range<i32> {
        self.min_degree..self.end_degree()
    }

    pub fn is_bigraded(&self) -> bool {
        self.bigraded
    }

    fn slot(&self, deg: i32) -> Option<usize> {
        let k = deg - self.min_degree;
        (k >= 0 && (k as usize) < self.internal.len()).then_some(k as usize)
    }

    pub fn dim(&self, deg: i32) -> usize {
        self.slot(deg).map_or(0, |k| self.internal[k].len())
    }

    pub fn total_dim(&self) -> usize {
        self.internal.iter().map(Vec::len).sum()
    }

    pub fn internal_degrees(&self, deg: i32) -> &[i32] {
        self.slot(deg).map_or(&[], |k| &self.internal[k])
    }

    pub fn label(&self, deg: i32, idx: usize) -> Option<&str> {
        let k = self.slot(deg)?;
        self.labels.as_ref().map(|l| l[k][idx].as_str())
    }

    pub fn labels(&self) -> Option<&Vec<Vec<String>>> {
        self.labels.as_ref()
    }

    /// Internal degrees occurring in cohomological degree `deg`, ascending.
    pub fn blocks(&self, deg: i32) -> impl Iterator<Item = i32> + '_ {
        self.slot(deg).into_iter().flat_map(move |k| self.blocks[k].keys().copied())
    }

    /// Positions (within degree `deg`) of the basis vectors in block `(deg, w)`.
    pub fn block(&self, deg: i32, w: i32) -> &[usize] {
        self.slot(deg).and_then(|k| self.blocks[k].get(&w)).map_or(&[], |v| v.as_slice())
    }

    pub fn block_dim(&self, deg: i32, w: i32) -> usize {
        self.block(deg, w).len()
    }

    /// `(internal degree, position inside block)` of basis vector `idx` in degree `deg`.
    pub fn locate(&self, deg: i32, idx: usize) -> (i32, usize) {
        self.locate[self.slot(deg).expect("degree outside support")][idx]
    }

    /// All `(degree, internal)` blocks, ordered by degree then internal degree.
    pub fn all_blocks(&self) -> Vec<(i32, i32)> {
        self.degrees().flat_map(|d| self.blocks(d).map(move |w| (d, w))).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.internal.iter().map(Vec::len).collect()
    }

    /// Offset of degree `deg` in the concatenation of all degrees.
    pub fn offset(&self, deg: i32) -> usize {
        self.degrees().take_while(|&d| d < deg).map(|d| self.dim(d)).sum()
    }

    /// Degree and in-degree index of a global (concatenated) basis index.
    pub fn split_global(&self, mut g: usize) -> (i32, usize) {
        for d in self.degrees() {
            let n = self.dim(d);
            if g < n {
                return (d, g);
            }
            g -= n;
        }
        panic!("global index out of range");
    }
}

/// Outcome of [`check_complex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexReport {
    pub passed: bool,
    pub first_failure: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainComplex {
    p: Prime,
    space: GradedSpace,
    diffs: BTreeMap<(i32, i32), FpMatrix>,
}

impl CochainComplex {
    /// Builds a complex from blockwise differentials. Missing blocks are zero.
    pub fn from_blocks(p: Prime, space: GradedSpace, diffs: BTreeMap<(i32, i32), FpMatrix>) -> Result<Self> {
        for (&(deg, w), m) in &diffs {
            if m.prime() != p {
                return Err(Error::ModulusMismatch(p.value(), m.prime().value()));
            }
            let shape = (space.block_dim(deg + 1, w), space.block_dim(deg, w));
            if (m.rows(), m.cols()) != shape {
                return Err(Error::ShapeMismatch(format!(
                    "differential block ({deg}, {w}) is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        let diffs = diffs.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(CochainComplex { p, space, diffs })
    }

    /// Builds a complex from full matrices `d^i : A^i -> A^{i+1}`. Entries that
    /// connect different internal degrees are rejected.
    pub fn from_full(p: Prime, space: GradedSpace, full: &BTreeMap<i32, FpMatrix>) -> Result<Self> {
        let mut diffs = BTreeMap::new();
        for (&deg, m) in full {
            if (m.rows(), m.cols()) != (space.dim(deg + 1), space.dim(deg)) {
                return Err(Error::ShapeMismatch(format!(
                    "d^{deg} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    space.dim(deg + 1),
                    space.dim(deg)
                )));
            }
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if m.get(r, c) != 0 && space.locate(deg + 1, r).0 != space.locate(deg, c).0 {
                        return Err(Error::InvalidInput(format!("d^{deg} does not preserve internal degree")));
                    }
                }
            }
            for w in space.blocks(deg).collect::<Vec<_>>() {
                let rows = space.block(deg + 1, w);
                if rows.is_empty() {
                    continue;
                }
                let block = m.select_rows(rows).select_columns(space.block(deg, w));
                diffs.insert((deg, w), block);
            }
        }
        Self::from_blocks(p, space, diffs)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    /// Differential block `(deg, w) -> (deg + 1, w)`, zero if not stored.
    pub fn block_differential(&self, deg: i32, w: i32) -> FpMatrix {
        self.diffs.get(&(deg, w)).cloned().unwrap_or_else(|| {
            FpMatrix::zeros(self.space.block_dim(deg + 1, w), self.space.block_dim(deg, w), self.p)
        })
    }

    pub fn stored_block(&self, deg: i32, w: i32) -> Option<&FpMatrix> {
        self.diffs.get(&(deg, w))
    }

    /// Applies the differential to a vector in block `(deg, w)`.
    pub fn apply_block(&self, deg: i32, w: i32, v: &[u32]) -> Vec<u32> {
        match self.diffs.get(&(deg, w)) {
            Some(m) => m.mul_vec(v),
            None => vec![0; self.space.block_dim(deg + 1, w)],
        }
    }

    /// Full matrix of `d^deg` in the ordered basis of each degree.
    pub fn differential(&self, deg: i32) -> FpMatrix {
        let mut full = FpMatrix::zeros(self.space.dim(deg + 1), self.space.dim(deg), self.p);
        for w in self.space.blocks(deg) {
            if let Some(m) = self.diffs.get(&(deg, w)) {
                let rows = self.space.block(deg + 1, w);
                let cols = self.space.block(deg, w);
                for (i, &r) in rows.iter().enumerate() {
                    for (j, &c) in cols.iter().enumerate() {
                        full.set(r, c, m.get(i, j));
                    }
                }
            }
        }
        full
    }

    /// Cohomology dimensions per block, `dim ker d^i - rank d^{i-1}`.
    pub fn cohomology_dims(&self) -> BTreeMap<(i32, i32), usize> {
        self.space
            .all_blocks()
            .into_iter()
            .map(|(deg, w)| {
                let n = self.space.block_dim(deg, w);
                let out_rank = self.diffs.get(&(deg, w)).map_or(0, FpMatrix::rank);
                let in_rank = self.diffs.get(&(deg - 1, w)).map_or(0, FpMatrix::rank);
                ((deg, w), n - out_rank - in_rank)
            })
            .collect()
    }

    /// Cohomology dimension per cohomological degree.
    pub fn betti(&self) -> BTreeMap<i32, usize> {
        let mut out: BTreeMap<i32, usize> = self.space.degrees().map(|d| (d, 0)).collect();
        for ((deg, _), n) in self.cohomology_dims() {
            *out.entry(deg).or_default() += n;
        }
        out
    }
}

/// Checks `d^{i+1} o d^i = 0` for every degree and reports the first failure.
pub fn check_complex(c: &CochainComplex) -> ComplexReport {
    for (deg, w) in c.space.all_blocks() {
        let (Some(d0), Some(d1)) = (c.diffs.get(&(deg, w)), c.diffs.get(&(deg + 1, w))) else {
            continue;
        };
        if !d1.mul(d0).expect("block shapes agree").is_zero() {
            return ComplexReport { passed: false, first_failure: Some(deg) };
        }
    }
    ComplexReport { passed: true, first_failure: None }
}

pub(crate) fn require_complex(c: &CochainComplex) -> Result<()> {
    match check_complex(c).first_failure {
        Some(deg) => Err(Error::MalformedComplex { degree: deg, next: deg + 1 }),
        None => Ok(()),
    }
}
