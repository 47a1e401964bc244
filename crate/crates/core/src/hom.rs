//! Morphism complexes `Hom•(P, Q)` between free complexes, endomorphism DGAs
//! and finite-dimensional duality.
//!
//! An element of degree `i` is a family `a_q : P^q -> Q^{q+i}` with
//! differential `d(a)_q = d ∘ a_q - (-1)^i a_{q+1} ∘ d`. The product on
//! `End•(P)` is plain composition `(ab)_q = a_{q+j} ∘ b_q`; with this
//! differential an extra factor `(-1)^{ij}` would break the Leibniz rule.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, Prime};
use crate::free::FreeComplex;
use crate::graded::{CochainComplex, GradedSpace};
use crate::sparse::SparseVec;

/// The basis map sending generator `source` of `P^position` to
/// `monomial * target`, `target` a generator of `Q^{position + degree}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomBasis {
    pub position: i32,
    pub source: usize,
    pub target: usize,
    pub monomial: usize,
}

#[derive(Debug, Clone)]
pub struct HomComplex {
    source: Arc<FreeComplex>,
    target: Arc<FreeComplex>,
    window: Option<(i32, i32)>,
    basis: BTreeMap<i32, Vec<HomBasis>>,
    index: HashMap<(i32, HomBasis), usize>,
    complex: CochainComplex,
}

impl HomComplex {
    /// All module maps between the free complexes. With `window = Some((lo, hi))`
    /// only basis maps of internal degree in `[lo, hi]` are kept; the internal
    /// degree of a basis map is `weight(monomial) + |target| - |source|`.
    pub fn new(source: Arc<FreeComplex>, target: Arc<FreeComplex>, window: Option<(i32, i32)>) -> Result<Self> {
        if source.algebra() != target.algebra() {
            return Err(Error::InvalidInput("source and target live over different algebras".into()));
        }
        let algebra = source.algebra().clone();
        let lo = target.min_degree() - source.max_degree();
        let hi = target.max_degree() - source.min_degree();
        let mut basis = BTreeMap::new();
        let mut internal = Vec::new();
        for i in lo..=hi {
            let mut elems = Vec::new();
            let mut ws = Vec::new();
            for q in source.degrees() {
                let tg = target.generators(q + i);
                for (s, sg) in source.generators(q).iter().enumerate() {
                    for (t, tgen) in tg.iter().enumerate() {
                        for m in 0..algebra.dim() {
                            let w = algebra.weight(m) + tgen.internal - sg.internal;
                            if window.map_or(true, |(a, b)| a <= w && w <= b) {
                                elems.push(HomBasis { position: q, source: s, target: t, monomial: m });
                                ws.push(w);
                            }
                        }
                    }
                }
            }
            basis.insert(i, elems);
            internal.push(ws);
        }
        let index = basis
            .iter()
            .flat_map(|(&i, elems)| elems.iter().enumerate().map(move |(j, &b)| ((i, b), j)))
            .collect();
        let space = GradedSpace::bigraded(lo, internal);
        let mut hom = HomComplex {
            source,
            target,
            window,
            basis,
            index,
            complex: CochainComplex::from_blocks(algebra.prime(), space, BTreeMap::new())?,
        };
        hom.complex = hom.build_differential()?;
        Ok(hom)
    }

    fn build_differential(&self) -> Result<CochainComplex> {
        let p = self.prime();
        let space = self.complex.space().clone();
        let mut blocks = BTreeMap::new();
        for (&i, elems) in &self.basis {
            let images: Vec<SparseVec> = (0..elems.len()).into_par_iter().map(|j| self.differential_of(i, j)).collect();
            let mut per_block: BTreeMap<i32, FpMatrix> = BTreeMap::new();
            for (j, img) in images.iter().enumerate() {
                let (w, col) = space.locate(i, j);
                for (&r, &c) in img.iter() {
                    let (w2, row) = space.locate(i + 1, r);
                    debug_assert_eq!(w, w2);
                    per_block
                        .entry(w)
                        .or_insert_with(|| FpMatrix::zeros(space.block_dim(i + 1, w), space.block_dim(i, w), p))
                        .set(row, col, c);
                }
            }
            blocks.extend(per_block.into_iter().map(|(w, m)| ((i, w), m)));
        }
        CochainComplex::from_blocks(p, space, blocks)
    }

    /// `d` of basis element `j` of degree `i`, in degree coordinates of `i + 1`.
    pub fn differential_of(&self, i: i32, j: usize) -> SparseVec {
        let b = self.basis[&i][j];
        let p = self.prime();
        let a = self.source.algebra();
        let mut out = SparseVec::zero();
        for t in self.target.differential_of(b.position + i, b.target) {
            if let Some(m) = a.product(b.monomial, t.monomial) {
                let e = HomBasis { position: b.position, source: b.source, target: t.target, monomial: m };
                if let Some(&k) = self.index.get(&(i + 1, e)) {
                    out.add_term(k, t.coeff, p);
                }
            }
        }
        let sign = p.neg(p.sign(i as i64));
        for &(g0, m0, c) in self.source.incoming(b.position, b.source) {
            if let Some(m) = a.product(m0, b.monomial) {
                let e = HomBasis { position: b.position - 1, source: g0, target: b.target, monomial: m };
                if let Some(&k) = self.index.get(&(i + 1, e)) {
                    out.add_term(k, p.mul(sign, c), p);
                }
            }
        }
        out
    }

    pub fn prime(&self) -> Prime {
        self.source.prime()
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    pub fn source(&self) -> &Arc<FreeComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FreeComplex> {
        &self.target
    }

    pub fn window(&self) -> Option<(i32, i32)> {
        self.window
    }

    pub fn basis(&self, deg: i32) -> &[HomBasis] {
        self.basis.get(&deg).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, deg: i32, b: &HomBasis) -> Option<usize> {
        self.index.get(&(deg, *b)).copied()
    }

    pub fn label(&self, deg: i32, j: usize) -> String {
        let b = self.basis[&deg][j];
        format!(
            "{}@{} -> {}*{}",
            self.source.generators(b.position)[b.source].label,
            b.position,
            self.source.algebra().label(b.monomial),
            self.target.generators(b.position + deg)[b.target].label
        )
    }
}

/// Order of composition in an endomorphism DGA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionOrder {
    Direct,
    /// The graded opposite, `a * b = (-1)^{|a||b|} b a`.
    Opposite,
}

/// A differential graded algebra with a chosen basis.
pub trait DgAlgebra: Send + Sync {
    fn complex(&self) -> &CochainComplex;

    /// Product of homogeneous elements of degrees `da` and `db`.
    fn multiply(&self, da: i32, a: &SparseVec, db: i32, b: &SparseVec) -> SparseVec;

    /// The unit, in degree 0.
    fn unit(&self) -> SparseVec;

    fn prime(&self) -> Prime {
        self.complex().prime()
    }

    fn space(&self) -> &GradedSpace {
        self.complex().space()
    }

    fn differential(&self, deg: i32, v: &SparseVec) -> SparseVec {
        let c = self.complex();
        let mut out = SparseVec::zero();
        for (w, coords) in v.to_blocks(c.space(), deg) {
            if let Some(m) = c.stored_block(deg, w) {
                out.add_scaled(&SparseVec::from_block(c.space(), deg + 1, w, &m.mul_vec(&coords), self.prime()), 1, self.prime());
            }
        }
        out
    }
}

/// `End•(P)` with the given composition order, optionally cut to an internal
/// degree window. Products leaving the window are dropped, so the window must
/// describe a quotient of a sub-DGA (for instance `[lo, 0]` when all internal
/// degrees of interest are non-positive).
#[derive(Debug, Clone)]
pub struct EndDga {
    hom: HomComplex,
    order: CompositionOrder,
}

impl EndDga {
    pub fn new(resolution: Arc<FreeComplex>, order: CompositionOrder, window: Option<(i32, i32)>) -> Result<Self> {
        if let Some((lo, hi)) = window {
            if lo > 0 || hi < 0 {
                return Err(Error::InvalidInput("internal window must contain 0 to hold the unit".into()));
            }
        }
        Ok(EndDga { hom: HomComplex::new(resolution.clone(), resolution, window)?, order })
    }

    pub fn hom(&self) -> &HomComplex {
        &self.hom
    }

    pub fn order(&self) -> CompositionOrder {
        self.order
    }

    /// Product of two basis elements: a single signed basis element or zero.
    pub fn multiply_basis(&self, da: i32, ia: usize, db: i32, ib: usize) -> Option<(usize, u32)> {
        let a = self.hom.basis[&da][ia];
        let b = self.hom.basis[&db][ib];
        let p = self.hom.prime();
        // first = map applied first, second = map applied after it
        let (first, df, second, sign) = match self.order {
            CompositionOrder::Direct => (b, db, a, 1),
            CompositionOrder::Opposite => (a, da, b, p.sign(da as i64 * db as i64)),
        };
        if second.position != first.position + df || second.source != first.target {
            return None;
        }
        let m = self.hom.source.algebra().product(first.monomial, second.monomial)?;
        let e = HomBasis { position: first.position, source: first.source, target: second.target, monomial: m };
        self.hom.index_of(da + db, &e).map(|k| (k, sign))
    }
}

impl DgAlgebra for EndDga {
    fn complex(&self) -> &CochainComplex {
        &self.hom.complex
    }

    fn multiply(&self, da: i32, a: &SparseVec, db: i32, b: &SparseVec) -> SparseVec {
        let p = self.prime();
        let mut out = SparseVec::zero();
        if a.is_zero() || b.is_zero() {
            return out;
        }
        // (degree, vector) of the map applied first, then of the one applied after it
        let (df, fv, ds, sv) = match self.order {
            CompositionOrder::Direct => (db, b, da, a),
            CompositionOrder::Opposite => (da, a, db, b),
        };
        // index the later map by the generator it starts from
        let mut by_source: HashMap<(i32, usize), Vec<(HomBasis, u32)>> = HashMap::new();
        for (&j, &c) in sv.iter() {
            let e = self.hom.basis[&ds][j];
            by_source.entry((e.position, e.source)).or_default().push((e, c));
        }
        let sign = match self.order {
            CompositionOrder::Direct => 1,
            CompositionOrder::Opposite => p.sign(da as i64 * db as i64),
        };
        let algebra = self.hom.source.algebra();
        for (&j, &c) in fv.iter() {
            let f = self.hom.basis[&df][j];
            let Some(later) = by_source.get(&(f.position + df, f.target)) else { continue };
            for &(s, c2) in later {
                let Some(m) = algebra.product(f.monomial, s.monomial) else { continue };
                let e = HomBasis { position: f.position, source: f.source, target: s.target, monomial: m };
                if let Some(k) = self.hom.index_of(da + db, &e) {
                    out.add_term(k, p.mul(sign, p.mul(c, c2)), p);
                }
            }
        }
        out
    }

    fn unit(&self) -> SparseVec {
        let src = &self.hom.source;
        let unit = src.algebra().unit();
        let mut out = SparseVec::zero();
        for q in src.degrees() {
            for g in 0..src.rank(q) {
                let e = HomBasis { position: q, source: g, target: g, monomial: unit };
                if let Some(k) = self.hom.index_of(0, &e) {
                    out.add_term(k, 1, self.prime());
                }
            }
        }
        out
    }
}

/// A DGA given by explicit structure constants on basis pairs. Missing pairs
/// multiply to zero.
#[derive(Debug, Clone)]
pub struct TableDga {
    complex: CochainComplex,
    products: BTreeMap<((i32, usize), (i32, usize)), SparseVec>,
    unit: SparseVec,
}

impl TableDga {
    pub fn new(
        complex: CochainComplex,
        products: BTreeMap<((i32, usize), (i32, usize)), SparseVec>,
        unit: SparseVec,
    ) -> Self {
        TableDga { complex, products, unit }
    }

    pub fn products(&self) -> &BTreeMap<((i32, usize), (i32, usize)), SparseVec> {
        &self.products
    }
}

impl DgAlgebra for TableDga {
    fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    fn multiply(&self, da: i32, a: &SparseVec, db: i32, b: &SparseVec) -> SparseVec {
        let p = self.prime();
        let mut out = SparseVec::zero();
        for (&i, &x) in a.iter() {
            for (&j, &y) in b.iter() {
                if let Some(v) = self.products.get(&((da, i), (db, j))) {
                    out.add_scaled(v, p.mul(x, y), p);
                }
            }
        }
        out
    }

    fn unit(&self) -> SparseVec {
        self.unit.clone()
    }
}

/// Outcome of [`check_dga`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgaReport {
    pub leibniz: bool,
    pub associative: bool,
    pub unital: bool,
    pub unit_closed: bool,
}

impl DgaReport {
    pub fn passed(&self) -> bool {
        self.leibniz && self.associative && self.unital && self.unit_closed
    }
}

/// Checks Leibniz on all basis pairs, associativity on all basis triples up to
/// `triple_budget` of them, and the unit axioms.
pub fn check_dga(a: &dyn DgAlgebra, triple_budget: usize) -> DgaReport {
    let p = a.prime();
    let space = a.space();
    let elems: Vec<(i32, usize)> = space.degrees().flat_map(|d| (0..space.dim(d)).map(move |j| (d, j))).collect();
    let unit = a.unit();
    let unit_closed = a.differential(0, &unit).is_zero();
    let unital = elems.par_iter().all(|&(d, j)| {
        let x = SparseVec::basis(j);
        a.multiply(0, &unit, d, &x) == x && a.multiply(d, &x, 0, &unit) == x
    });
    let leibniz = elems.par_iter().all(|&(da, ia)| {
        let x = SparseVec::basis(ia);
        let dx = a.differential(da, &x);
        elems.iter().all(|&(db, ib)| {
            let y = SparseVec::basis(ib);
            let lhs = a.differential(da + db, &a.multiply(da, &x, db, &y));
            let mut rhs = a.multiply(da + 1, &dx, db, &y);
            rhs.add_scaled(&a.multiply(da, &x, db + 1, &a.differential(db, &y)), p.sign(da as i64), p);
            lhs == rhs
        })
    });
    let n = elems.len();
    let associative = (0..n.pow(3).min(triple_budget)).into_par_iter().all(|t| {
        let (x, y, z) = (elems[t / (n * n)], elems[(t / n) % n], elems[t % n]);
        let (vx, vy, vz) = (SparseVec::basis(x.1), SparseVec::basis(y.1), SparseVec::basis(z.1));
        let left = a.multiply(x.0 + y.0, &a.multiply(x.0, &vx, y.0, &vy), z.0, &vz);
        let right = a.multiply(x.0, &vx, y.0 + z.0, &a.multiply(y.0, &vy, z.0, &vz));
        left == right
    });
    DgaReport { leibniz, associative, unital, unit_closed }
}

/// The dual complex `P^{-i} = (I^i)^∨` with transposed differentials and
/// negated internal degrees.
pub fn dual_complex(c: &CochainComplex) -> CochainComplex {
    let space = c.space();
    let (lo, hi) = (space.min_degree(), space.end_degree() - 1);
    let internal: Vec<Vec<i32>> =
        (lo..=hi).rev().map(|deg| space.internal_degrees(deg).iter().map(|w| -w).collect()).collect();
    let dual_space = if space.is_bigraded() {
        GradedSpace::bigraded(-hi, internal)
    } else {
        GradedSpace::new(-hi, &internal.iter().map(Vec::len).collect::<Vec<_>>())
    };
    let dual_space = match space.labels() {
        Some(labels) => {
            let dl = (lo..=hi).rev().map(|deg| labels[(deg - lo) as usize].iter().map(|l| format!("{l}^v")).collect()).collect();
            dual_space.clone().with_labels(dl).unwrap_or(dual_space)
        }
        None => dual_space,
    };
    let full = (lo..hi).map(|i| (-i - 1, c.differential(i).transpose())).collect();
    CochainComplex::from_full(c.prime(), dual_space, &full).expect("transpose preserves shapes")
}

/// The comparison `End•(I)^op -> End•(P)` on a basis element of degree `i`:
/// `a_q` goes to `ε(i) a_q^∨` placed at position `t = -q - i`, with
/// `ε(i) = (-1)^{i(i+1)/2}`. Both DGAs must be built over the ground field from
/// `I` and `dual_complex(I)`. Returns the target index and coefficient.
pub fn duality_image(end_i: &EndDga, end_p: &EndDga, deg: i32, idx: usize) -> Option<(usize, u32)> {
    let b = end_i.hom().basis(deg)[idx];
    let t = -b.position - deg;
    // generator j of I^q is generator j of P^{-q}
    let e = HomBasis { position: t, source: b.target, target: b.source, monomial: 0 };
    let p = end_i.prime();
    let k = end_p.hom().index_of(deg, &e)?;
    Some((k, p.sign(deg as i64 * (deg as i64 + 1) / 2)))
}

/// Outcome of [`check_duality`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    pub bijective: bool,
    pub commutes_with_d: bool,
    pub multiplicative: bool,
    pub unital: bool,
    pub pairs_checked: usize,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.commutes_with_d && self.multiplicative && self.unital
    }
}

/// Builds `End•(I)^op` and `End•(dual_complex(I))` and checks that the
/// comparison map is a bijective DGA morphism on all basis elements and pairs.
pub fn check_duality(c: &CochainComplex) -> Result<DualityReport> {
    let fi = Arc::new(FreeComplex::from_cochain(c)?);
    let fp_ = Arc::new(FreeComplex::from_cochain(&dual_complex(c))?);
    let end_i = EndDga::new(fi, CompositionOrder::Opposite, None)?;
    let end_p = EndDga::new(fp_, CompositionOrder::Direct, None)?;
    let p = c.prime();
    let si = end_i.space();
    let sp = end_p.space();
    let elems: Vec<(i32, usize)> = si.degrees().flat_map(|d| (0..si.dim(d)).map(move |j| (d, j))).collect();
    let phi = |d: i32, v: &SparseVec| -> SparseVec {
        let mut out = SparseVec::zero();
        for (&j, &x) in v.iter() {
            let (k, s) = duality_image(&end_i, &end_p, d, j).expect("image exists");
            out.add_term(k, p.mul(s, x), p);
        }
        out
    };

    let mut hit: BTreeMap<i32, Vec<bool>> = sp.degrees().map(|d| (d, vec![false; sp.dim(d)])).collect();
    let mut bijective = si.total_dim() == sp.total_dim();
    for &(d, j) in &elems {
        match duality_image(&end_i, &end_p, d, j) {
            Some((k, _)) if !hit[&d][k] => hit.get_mut(&d).expect("degree present")[k] = true,
            _ => bijective = false,
        }
    }
    if !bijective {
        return Ok(DualityReport { bijective, commutes_with_d: false, multiplicative: false, unital: false, pairs_checked: 0 });
    }
    let commutes_with_d = elems.iter().all(|&(d, j)| {
        let x = SparseVec::basis(j);
        phi(d + 1, &end_i.differential(d, &x)) == end_p.differential(d, &phi(d, &x))
    });
    let multiplicative = elems.par_iter().all(|&(da, ia)| {
        let x = SparseVec::basis(ia);
        elems.iter().all(|&(db, ib)| {
            let y = SparseVec::basis(ib);
            phi(da + db, &end_i.multiply(da, &x, db, &y)) == end_p.multiply(da, &phi(da, &x), db, &phi(db, &y))
        })
    });
    let unital = phi(0, &end_i.unit()) == end_p.unit();
    Ok(DualityReport { bijective, commutes_with_d, multiplicative, unital, pairs_checked: elems.len() * elems.len() })
}
