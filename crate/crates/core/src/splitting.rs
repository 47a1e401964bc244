//! Splittings `A^i = B^i ⊕ H^i ⊕ C^i` with the associated inclusion,
//! projection and contracting homotopy, computed block by block.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fp::{complement, extend_within, FpMatrix, Prime};
use crate::graded::{require_complex, CochainComplex, GradedSpace};
use crate::sparse::SparseVec;

/// Splitting data of one `(degree, internal)` block. Vectors are in block
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSplitting {
    pub boundaries: Vec<Vec<u32>>,
    pub harmonic: Vec<Vec<u32>>,
    pub complement: Vec<Vec<u32>>,
    /// `H -> A`, columns are the harmonic vectors.
    pub inclusion: FpMatrix,
    /// `A -> H`.
    pub projection: FpMatrix,
    /// `A^i -> A^{i-1}` in the same internal degree; zero on `H ⊕ C`.
    pub homotopy: FpMatrix,
}

#[derive(Debug, Clone)]
pub struct CohomologySplitting {
    p: Prime,
    space: GradedSpace,
    blocks: BTreeMap<(i32, i32), BlockSplitting>,
    cohomology: GradedSpace,
    // index of the first harmonic vector of each block inside its degree of H
    offsets: BTreeMap<(i32, i32), usize>,
}

/// A vector in degree `deg`, given in degree coordinates, used to seed the
/// choice of harmonic representatives (for instance the unit of a DGA).
#[derive(Debug, Clone)]
pub struct Seed {
    pub degree: i32,
    pub vector: SparseVec,
}

struct Partial {
    cycles: Vec<Vec<u32>>,
    complement: Vec<Vec<u32>>,
}

impl CohomologySplitting {
    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Space of the underlying complex.
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    /// The cohomology, bigraded by the internal degrees of the blocks.
    pub fn cohomology(&self) -> &GradedSpace {
        &self.cohomology
    }

    pub fn block(&self, deg: i32, w: i32) -> Option<&BlockSplitting> {
        self.blocks.get(&(deg, w))
    }

    pub fn blocks(&self) -> &BTreeMap<(i32, i32), BlockSplitting> {
        &self.blocks
    }

    /// `i` applied to a harmonic basis vector, in degree coordinates of `A`.
    pub fn include(&self, deg: i32, idx: usize) -> SparseVec {
        let (w, j) = self.cohomology.locate(deg, idx);
        let block = &self.blocks[&(deg, w)];
        SparseVec::from_block(&self.space, deg, w, &block.harmonic[j], self.p)
    }

    /// `i` applied to a vector of `H` in degree `deg`.
    pub fn include_vec(&self, deg: i32, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (&idx, &c) in v.iter() {
            out.add_scaled(&self.include(deg, idx), c, self.p);
        }
        out
    }

    /// `p` applied to a vector of `A^deg`; the result is in degree coordinates of `H`.
    pub fn project(&self, deg: i32, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (w, coords) in v.to_blocks(&self.space, deg) {
            let Some(block) = self.blocks.get(&(deg, w)) else { continue };
            let offset = self.offsets[&(deg, w)];
            for (j, c) in block.projection.mul_vec(&coords).into_iter().enumerate() {
                if c != 0 {
                    out.add_term(offset + j, c, self.p);
                }
            }
        }
        out
    }

    /// `h` applied to a vector of `A^deg`; the result lies in `A^{deg-1}`.
    pub fn homotopy(&self, deg: i32, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (w, coords) in v.to_blocks(&self.space, deg) {
            let Some(block) = self.blocks.get(&(deg, w)) else { continue };
            if block.homotopy.rows() == 0 {
                continue;
            }
            let image = block.homotopy.mul_vec(&coords);
            out.add_scaled(&SparseVec::from_block(&self.space, deg - 1, w, &image, self.p), 1, self.p);
        }
        out
    }

    /// Checks every splitting identity as an exact matrix equation.
    pub fn verify(&self, c: &CochainComplex) -> Result<()> {
        let p = self.p;
        let bad = |deg: i32, w: i32, what: &str| Err(Error::BadSplitting(format!("block ({deg}, {w}): {what}")));
        for (&(deg, w), b) in &self.blocks {
            let n = self.space.block_dim(deg, w);
            let nh = b.harmonic.len();
            if b.boundaries.len() + nh + b.complement.len() != n {
                return bad(deg, w, "B + H + C does not have full dimension");
            }
            let d_out = c.block_differential(deg, w);
            let d_in = c.block_differential(deg - 1, w);
            let cocycles: Vec<Vec<u32>> = b.boundaries.iter().chain(&b.harmonic).cloned().collect();
            if !cocycles.is_empty() && !d_out.mul(&FpMatrix::from_columns(&cocycles, n, p))?.is_zero() {
                return bad(deg, w, "B or H contains a non-cocycle");
            }
            if b.projection.mul(&b.inclusion)? != FpMatrix::identity(nh, p) {
                return bad(deg, w, "p i != Id");
            }
            // Id - i p = d h + h d
            let lhs = FpMatrix::identity(n, p).sub(&b.inclusion.mul(&b.projection)?)?;
            let dh = d_in.mul(&b.homotopy)?;
            let hd = match self.blocks.get(&(deg + 1, w)) {
                Some(next) => next.homotopy.mul(&d_out)?,
                None => FpMatrix::zeros(n, n, p),
            };
            if lhs != dh.add(&hd)? {
                return bad(deg, w, "Id - i p != d h + h d");
            }
            if !b.homotopy.mul(&b.inclusion)?.is_zero() {
                return bad(deg, w, "h i != 0");
            }
            if let Some(prev) = self.blocks.get(&(deg - 1, w)) {
                if !prev.projection.mul(&b.homotopy)?.is_zero() {
                    return bad(deg, w, "p h != 0");
                }
                if !prev.homotopy.mul(&b.homotopy)?.is_zero() {
                    return bad(deg, w, "h h != 0");
                }
            }
        }
        Ok(())
    }
}

/// Computes the splitting of every block. `seeds` are tried first when
/// choosing harmonic representatives; seeds that are not cocycles or that are
/// already accounted for are skipped.
pub fn cohomology_splitting(c: &CochainComplex, seeds: &[Seed]) -> Result<CohomologySplitting> {
    require_complex(c)?;
    let p = c.prime();
    let space = c.space().clone();
    let keys = space.all_blocks();

    let partial: BTreeMap<(i32, i32), Partial> = keys
        .par_iter()
        .map(|&(deg, w)| {
            let n = space.block_dim(deg, w);
            let cycles = c.block_differential(deg, w).kernel_basis();
            let complement = complement(&cycles, n, p).expect("kernel basis is independent");
            ((deg, w), Partial { cycles, complement })
        })
        .collect();

    let mut seeded: BTreeMap<(i32, i32), Vec<Vec<u32>>> = BTreeMap::new();
    for s in seeds {
        for (w, coords) in s.vector.to_blocks(&space, s.degree) {
            seeded.entry((s.degree, w)).or_default().push(coords);
        }
    }

    let blocks: Result<BTreeMap<(i32, i32), BlockSplitting>> = keys
        .par_iter()
        .map(|&(deg, w)| {
            let n = space.block_dim(deg, w);
            let part = &partial[&(deg, w)];
            let d_out = c.block_differential(deg, w);
            let prev_complement: &[Vec<u32>] = partial.get(&(deg - 1, w)).map_or(&[], |q| &q.complement);
            let boundaries: Vec<Vec<u32>> = match c.stored_block(deg - 1, w) {
                Some(d_in) if !prev_complement.is_empty() => d_in
                    .mul(&FpMatrix::from_columns(prev_complement, d_in.cols(), p))
                    .expect("block shapes agree")
                    .columns(),
                _ => Vec::new(),
            };
            let candidates = seeded
                .get(&(deg, w))
                .into_iter()
                .flatten()
                .filter(|v| d_out.mul_vec(v).iter().all(|&x| x == 0))
                .cloned()
                .chain(part.cycles.iter().cloned());
            let mut harmonic = extend_within(&boundaries, candidates, n, p)?;
            harmonic.truncate(part.cycles.len() - boundaries.len());
            if boundaries.len() + harmonic.len() != part.cycles.len() {
                return Err(Error::BadSplitting(format!("block ({deg}, {w}): B is not inside Z")));
            }
            let mut columns = boundaries.clone();
            columns.extend(harmonic.iter().cloned());
            columns.extend(part.complement.iter().cloned());
            let m = FpMatrix::from_columns(&columns, n, p);
            let minv = m
                .inverse()
                .ok_or_else(|| Error::BadSplitting(format!("block ({deg}, {w}): B, H, C not independent")))?;
            let nb = boundaries.len();
            let nh = harmonic.len();
            let projection = minv.select_rows(&(nb..nb + nh).collect::<Vec<_>>());
            let prev_dim = space.block_dim(deg - 1, w);
            let homotopy = if nb == 0 {
                FpMatrix::zeros(prev_dim, n, p)
            } else {
                let gamma = FpMatrix::from_columns(prev_complement, prev_dim, p);
                gamma.mul(&minv.select_rows(&(0..nb).collect::<Vec<_>>()))?
            };
            let inclusion = FpMatrix::from_columns(&harmonic, n, p);
            Ok((
                (deg, w),
                BlockSplitting {
                    boundaries,
                    harmonic,
                    complement: part.complement.clone(),
                    inclusion,
                    projection,
                    homotopy,
                },
            ))
        })
        .collect();
    let blocks = blocks?;

    let mut internal = Vec::new();
    let mut offsets = BTreeMap::new();
    for deg in space.degrees() {
        let mut ws = Vec::new();
        for w in space.blocks(deg) {
            offsets.insert((deg, w), ws.len());
            ws.extend(std::iter::repeat(w).take(blocks[&(deg, w)].harmonic.len()));
        }
        internal.push(ws);
    }
    let cohomology = if space.is_bigraded() {
        GradedSpace::bigraded(space.min_degree(), internal)
    } else {
        GradedSpace::new(space.min_degree(), &internal.iter().map(Vec::len).collect::<Vec<_>>())
    };
    let split = CohomologySplitting { p, space, blocks, cohomology, offsets };
    split.verify(c)?;
    Ok(split)
}
