//! End-to-end pipelines: resolution, End DGA, splitting, transfer, and the
//! resulting Ext algebra.

use std::sync::Arc;

use crate::ainfinity::{transfer_minimal_model, BasisRef, Transfer};
use crate::error::{Error, Result};
use crate::fp::{FpMatrix, Prime};
use crate::free::FreeComplex;
use crate::hom::{CompositionOrder, DgAlgebra, EndDga};
use crate::monomial::MonomialAlgebra;
use crate::resolution::{bar_resolution, koszul_resolution, Resolution};
use crate::splitting::{cohomology_splitting, CohomologySplitting, Seed};

/// Which End DGA to transfer from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelInput {
    /// Koszul resolution of `k` over `S(V)`, `dim V = d`, truncated at total degree `cap`.
    Koszul { d: usize, cap: u32 },
    /// Normalized bar resolution of `k` over `F_p[x]/(x^n)` of the given length.
    PowerOfVariable { n: u32, length: usize },
    /// Normalized bar resolution of `k` over `F_p[X_1..X_d]/(X)^n` of the given length.
    TruncatedPolynomial { d: usize, n: u32, length: usize },
}

pub struct MinimalModel {
    pub input: ModelInput,
    pub resolution: Resolution,
    pub end: EndDga,
    pub splitting: CohomologySplitting,
    pub transfer: Transfer,
    /// Largest cohomological degree in which Ext is computed exactly.
    pub certified_through: i32,
}

impl MinimalModel {
    pub fn prime(&self) -> Prime {
        self.end.prime()
    }
}

/// End DGA window for a resolution: internal degrees `[lo, 0]`, where `lo`
/// is minus the largest internal degree of a generator. Ext lives in
/// non-positive internal degrees and this part is a sub-DGA.
fn end_window(fc: &FreeComplex) -> (i32, i32) {
    let top = fc.degrees().flat_map(|q| fc.generators(q).iter().map(|g| g.internal)).max().unwrap_or(0);
    (-top, 0)
}

/// Builds and transfers the minimal model up to arity `n_max`.
pub fn minimal_model(p: Prime, input: ModelInput, n_max: usize) -> Result<MinimalModel> {
    let (resolution, certified_through) = match input {
        ModelInput::Koszul { d, cap } => (koszul_resolution(d, p, cap)?, d as i32),
        ModelInput::PowerOfVariable { n, length } => {
            let a = Arc::new(MonomialAlgebra::power_of_variable(p, n)?);
            (bar_resolution(a, length, true)?, length as i32 - 2)
        }
        ModelInput::TruncatedPolynomial { d, n, length } => {
            let a = Arc::new(MonomialAlgebra::truncated_polynomial(p, d, n)?);
            (bar_resolution(a, length, true)?, length as i32 - 2)
        }
    };
    let complex = resolution.complex().clone();
    let window = end_window(&complex);
    let end = EndDga::new(complex, CompositionOrder::Direct, Some(window))?;
    let unit = Seed { degree: 0, vector: end.unit() };
    let splitting = cohomology_splitting(end.complex(), &[unit])?;
    let support = match input {
        ModelInput::Koszul { .. } => None,
        _ => Some(bar_support(&end, &splitting, certified_through)),
    };
    let mut transfer = transfer_minimal_model(&end, &splitting, n_max, support.as_deref(), Some(certified_through))?;
    transfer.minimal.certified = Some((0, certified_through));
    Ok(MinimalModel { input, resolution, end, splitting, transfer, certified_through })
}

/// The unit class together with the classes in degrees `1..=top` of a bar
/// End DGA; the remaining classes come from the truncation of the resolution.
fn bar_support(end: &EndDga, split: &CohomologySplitting, top: i32) -> Vec<BasisRef> {
    let h = split.cohomology();
    let unit = split.project(0, &end.unit());
    let mut out: Vec<BasisRef> = unit.iter().map(|(&i, _)| (0, i)).collect();
    for deg in 1..=top {
        out.extend((0..h.dim(deg)).map(|i| (deg, i)));
    }
    out
}

/// Ext algebra with its Yoneda product, read off from `μ_2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtAlgebra {
    pub p: Prime,
    /// `dims[i] = dim Ext^i` for `0 <= i <= i_max`.
    pub dims: Vec<usize>,
    /// Internal degree of each basis class, per cohomological degree.
    pub internal: Vec<Vec<i32>>,
    /// Nonzero products `((i, a), (j, b)) -> Σ c_k e_k` of degree `i + j`.
    pub products: Vec<(BasisRef, BasisRef, Vec<(usize, u32)>)>,
    pub unit: Option<BasisRef>,
    pub certified_through: i32,
}

/// Ext up to degree `i_max`, refusing degrees outside the certified window.
pub fn ext_algebra(p: Prime, input: ModelInput, i_max: usize) -> Result<ExtAlgebra> {
    let model = minimal_model(p, input, 2)?;
    if i_max as i64 > model.certified_through as i64 {
        return Err(Error::UncertifiedDegree { requested: i_max as i64, certified: model.certified_through as i64 });
    }
    let h = &model.transfer.minimal;
    let dims = (0..=i_max as i32).map(|i| h.space.dim(i)).collect();
    let internal = (0..=i_max as i32).map(|i| h.space.internal_degrees(i).to_vec()).collect();
    let products = h
        .map(2)
        .into_iter()
        .flatten()
        .filter(|(k, _)| k[0].0 + k[1].0 <= i_max as i32)
        .map(|(k, v)| (k[0], k[1], v.iter().map(|(&i, &c)| (i, c)).collect()))
        .collect();
    Ok(ExtAlgebra { p, dims, internal, products, unit: h.unit, certified_through: model.certified_through })
}

impl ExtAlgebra {
    pub fn product(&self, a: BasisRef, b: BasisRef) -> Vec<(usize, u32)> {
        self.products.iter().find(|(x, y, _)| *x == a && *y == b).map_or(Vec::new(), |t| t.2.clone())
    }

    fn dense_product(&self, a: BasisRef, b: BasisRef) -> Vec<u32> {
        let mut v = vec![0; self.dims.get((a.0 + b.0) as usize).copied().unwrap_or(0)];
        for (k, c) in self.product(a, b) {
            v[k] = c;
        }
        v
    }

    /// Degree-one pairs `(a, b)` with `y_a y_b + y_b y_a != 0` (covering `y_a^2 != 0` when `a = b`).
    pub fn anticommutation_failures(&self) -> Vec<(usize, usize)> {
        let n = self.dims.get(1).copied().unwrap_or(0);
        let mut out = Vec::new();
        for a in 0..n {
            for b in a..n {
                let ab = self.dense_product((1, a), (1, b));
                let ba = self.dense_product((1, b), (1, a));
                if ab.iter().zip(&ba).any(|(&x, &y)| self.p.add(x, y) != 0) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Degrees `i >= 2` where `Ext^1 · Ext^{i-1}` fails to span `Ext^i`.
    pub fn degrees_not_generated(&self) -> Vec<usize> {
        (2..self.dims.len())
            .filter(|&i| {
                let columns: Vec<Vec<u32>> = (0..self.dims[1])
                    .flat_map(|a| (0..self.dims[i - 1]).map(move |b| (a, b)))
                    .map(|(a, b)| self.dense_product((1, a), (i as i32 - 1, b)))
                    .collect();
                FpMatrix::from_columns(&columns, self.dims[i], self.p).rank() < self.dims[i]
            })
            .collect()
    }
}
