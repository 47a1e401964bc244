//! A∞-algebras, morphisms and modules over F_p: identity checkers, homotopy
//! transfer to a minimal model, opposites and restriction of modules.
//!
//! Sign conventions. The Stasheff identity in arity `n` is
//! `Σ_{r+s+t=n} (-1)^{r+st} m_{r+1+t}(1^{⊗r} ⊗ m_s ⊗ 1^{⊗t}) = 0`, and a map of
//! degree `e` passing the inputs `x_1..x_r` contributes
//! `(-1)^{e(|x_1|+..+|x_r|)}`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::graded::GradedSpace;
use crate::hom::DgAlgebra;
use crate::sparse::SparseVec;
use crate::splitting::CohomologySplitting;

/// A basis vector: `(degree, index within degree)`.
pub type BasisRef = (i32, usize);

/// Multilinear operation tables keyed by basis tensors.
pub type OperationTable = BTreeMap<Vec<BasisRef>, SparseVec>;

pub trait AInfinity: Sync {
    fn prime(&self) -> Prime;
    fn space(&self) -> &GradedSpace;
    /// Operations of larger arity are zero.
    fn max_arity(&self) -> usize;
    /// `m_n` on a basis tensor; the output lies in degree `Σ|x_k| + 2 - n`.
    fn operation(&self, inputs: &[BasisRef]) -> SparseVec;
    /// The designated strict unit, in degree 0.
    fn unit(&self) -> Option<SparseVec>;

    /// Basis vectors on which checks are run.
    fn support(&self) -> Vec<BasisRef> {
        all_basis(self.space())
    }

    /// Largest degree in which outputs are exact; outputs above it are
    /// truncated away and identities involving them are not checked.
    fn certified_top(&self) -> Option<i32> {
        None
    }

    /// `m_n` on homogeneous vectors.
    fn apply(&self, inputs: &[(i32, &SparseVec)]) -> SparseVec {
        if inputs.len() > self.max_arity() {
            return SparseVec::zero();
        }
        let p = self.prime();
        let mut out = SparseVec::zero();
        for_each_basis_tensor(inputs, p, &mut |refs, c| out.add_scaled(&self.operation(refs), c, p));
        out
    }
}

pub fn all_basis(space: &GradedSpace) -> Vec<BasisRef> {
    space.degrees().flat_map(|d| (0..space.dim(d)).map(move |j| (d, j))).collect()
}

fn for_each_basis_tensor(inputs: &[(i32, &SparseVec)], p: Prime, f: &mut dyn FnMut(&[BasisRef], u32)) {
    fn go(
        inputs: &[(i32, &SparseVec)],
        k: usize,
        refs: &mut Vec<BasisRef>,
        c: u32,
        p: Prime,
        f: &mut dyn FnMut(&[BasisRef], u32),
    ) {
        if k == inputs.len() {
            f(refs, c);
            return;
        }
        let (deg, v) = inputs[k];
        for (&i, &x) in v.iter() {
            refs.push((deg, i));
            go(inputs, k + 1, refs, p.mul(c, x), p, f);
            refs.pop();
        }
    }
    go(inputs, 0, &mut Vec::with_capacity(inputs.len()), 1, p, f);
}

fn degree_sum(refs: &[BasisRef]) -> i64 {
    refs.iter().map(|r| r.0 as i64).sum()
}

/// Stores a table entry, keeping zero values and empty tables out so that
/// equal structures compare equal.
fn store(maps: &mut BTreeMap<usize, OperationTable>, inputs: Vec<BasisRef>, value: SparseVec) {
    let n = inputs.len();
    if value.is_zero() {
        if let Some(t) = maps.get_mut(&n) {
            t.remove(&inputs);
            if t.is_empty() {
                maps.remove(&n);
            }
        }
    } else {
        maps.entry(n).or_default().insert(inputs, value);
    }
}

/// An A∞-structure given by explicit tables of structure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableAInfinity {
    pub p: Prime,
    pub space: GradedSpace,
    pub n_max: usize,
    /// `maps[n]` holds the nonzero values of `m_n` on basis tensors.
    pub maps: BTreeMap<usize, OperationTable>,
    pub unit: Option<BasisRef>,
    /// Degrees `[lo, hi]` in which the structure is known to be exact.
    pub certified: Option<(i32, i32)>,
}

impl TableAInfinity {
    pub fn new(p: Prime, space: GradedSpace, n_max: usize) -> Self {
        TableAInfinity { p, space, n_max, maps: BTreeMap::new(), unit: None, certified: None }
    }

    /// Sets `m_n(inputs) = value`, enforcing the degree `2 - n` and the arity bound.
    pub fn set(&mut self, inputs: Vec<BasisRef>, value: SparseVec) -> Result<()> {
        let n = inputs.len();
        if n == 0 || n > self.n_max {
            return Err(Error::ArityOverflow { requested: n, bound: self.n_max });
        }
        for &(d, i) in &inputs {
            if i >= self.space.dim(d) {
                return Err(Error::DegreeMismatch(format!("no basis vector {i} in degree {d}")));
            }
        }
        let out_deg = degree_sum(&inputs) + 2 - n as i64;
        if let Some((&i, _)) = value.iter().last() {
            if i >= self.space.dim(out_deg as i32) {
                return Err(Error::DegreeMismatch(format!("m_{n} must land in degree {out_deg}")));
            }
        }
        store(&mut self.maps, inputs, value);
        Ok(())
    }

    pub fn map(&self, n: usize) -> Option<&OperationTable> {
        self.maps.get(&n)
    }

    /// Number of nonzero structure constants of `m_n`.
    pub fn nonzero_count(&self, n: usize) -> usize {
        self.maps.get(&n).map_or(0, |t| t.values().map(SparseVec::len).sum())
    }
}

impl AInfinity for TableAInfinity {
    fn prime(&self) -> Prime {
        self.p
    }

    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn max_arity(&self) -> usize {
        self.n_max
    }

    fn operation(&self, inputs: &[BasisRef]) -> SparseVec {
        self.maps.get(&inputs.len()).and_then(|t| t.get(inputs)).cloned().unwrap_or_default()
    }

    fn unit(&self) -> Option<SparseVec> {
        self.unit.map(|(_, i)| SparseVec::basis(i))
    }

    fn certified_top(&self) -> Option<i32> {
        self.certified.map(|c| c.1)
    }
}

/// A DGA viewed as an A∞-algebra with `m_1 = d`, `m_2` the product.
pub struct DgaAsAInfinity<'a>(pub &'a dyn DgAlgebra);

impl AInfinity for DgaAsAInfinity<'_> {
    fn prime(&self) -> Prime {
        self.0.prime()
    }

    fn space(&self) -> &GradedSpace {
        self.0.space()
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn operation(&self, inputs: &[BasisRef]) -> SparseVec {
        match inputs {
            [(d, i)] => self.0.differential(*d, &SparseVec::basis(*i)),
            [(da, i), (db, j)] => self.0.multiply(*da, &SparseVec::basis(*i), *db, &SparseVec::basis(*j)),
            _ => SparseVec::zero(),
        }
    }

    fn unit(&self) -> Option<SparseVec> {
        Some(self.0.unit())
    }

    fn apply(&self, inputs: &[(i32, &SparseVec)]) -> SparseVec {
        match inputs {
            [(d, v)] => self.0.differential(*d, v),
            [(da, a), (db, b)] => self.0.multiply(*da, a, *db, b),
            _ => SparseVec::zero(),
        }
    }
}

/// A located failure of an identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub arity: usize,
    pub inputs: Vec<BasisRef>,
    /// Degree of the residual and its nonzero coordinates.
    pub degree: i32,
    pub residual: SparseVec,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub passed: bool,
    pub tensors_checked: usize,
    pub violation_count: usize,
    /// The first violations found, in tensor order (at most [`MAX_REPORTED`]).
    pub violations: Vec<Violation>,
}

pub const MAX_REPORTED: usize = 20;

impl CheckReport {
    fn from_results(results: Vec<(usize, Option<Violation>)>) -> Self {
        let tensors_checked = results.iter().map(|r| r.0).sum();
        let all: Vec<Violation> = results.into_iter().filter_map(|r| r.1).collect();
        CheckReport {
            passed: all.is_empty(),
            tensors_checked,
            violation_count: all.len(),
            violations: all.into_iter().take(MAX_REPORTED).collect(),
        }
    }

    fn merge(mut self, other: CheckReport) -> Self {
        self.passed &= other.passed;
        self.tensors_checked += other.tensors_checked;
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        self.violations.truncate(MAX_REPORTED);
        self
    }

    fn empty() -> Self {
        CheckReport { passed: true, ..Default::default() }
    }
}

/// All tuples of length `n` over `basis`, in lexicographic order.
fn tuples(basis: &[BasisRef], n: usize) -> Vec<Vec<BasisRef>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                basis.iter().map(move |&b| {
                    let mut v = t.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    out
}

fn vec_inputs(refs: &[BasisRef]) -> Vec<(i32, SparseVec)> {
    refs.iter().map(|&(d, i)| (d, SparseVec::basis(i))).collect()
}

fn borrow(v: &[(i32, SparseVec)]) -> Vec<(i32, &SparseVec)> {
    v.iter().map(|(d, x)| (*d, x)).collect()
}

/// `Σ_{r+s+t=n} (-1)^{r+st} outer(1^r ⊗ m_s ⊗ 1^t)` on a basis tensor, where
/// `outer` is evaluated on vectors.
fn composite_sum(
    a: &dyn AInfinity,
    x: &[BasisRef],
    outer: &dyn Fn(&[(i32, &SparseVec)]) -> SparseVec,
    outer_max: usize,
) -> SparseVec {
    let p = a.prime();
    let n = x.len();
    let basis = vec_inputs(x);
    let mut out = SparseVec::zero();
    for s in 1..=n.min(a.max_arity()) {
        for r in 0..=n - s {
            let t = n - r - s;
            if r + 1 + t > outer_max {
                continue;
            }
            let inner = a.apply(&borrow(&basis[r..r + s]));
            if inner.is_zero() {
                continue;
            }
            let inner_deg = (degree_sum(&x[r..r + s]) + 2 - s as i64) as i32;
            let sign = p.sign(r as i64 + (s * t) as i64 + s as i64 * degree_sum(&x[..r]));
            let mut args: Vec<(i32, &SparseVec)> = borrow(&basis[..r]);
            args.push((inner_deg, &inner));
            args.extend(borrow(&basis[r + s..]));
            out.add_scaled(&outer(&args), sign, p);
        }
    }
    out
}

/// True when every operation applied to a contiguous run of `x` lands in
/// degrees at most `top`.
fn within_window(x: &[BasisRef], top: Option<i32>) -> bool {
    let Some(top) = top else { return true };
    (0..x.len()).all(|i| (i + 1..=x.len()).all(|j| degree_sum(&x[i..j]) + 2 - (j - i) as i64 <= top as i64))
}

fn output_has_room(space: &GradedSpace, deg: i64) -> bool {
    deg >= i32::MIN as i64 && deg <= i32::MAX as i64 && space.dim(deg as i32) > 0
}

/// Evaluates the Stasheff identities for every arity `1..=n_max` on every
/// basis tensor of the support.
pub fn check_stasheff(a: &dyn AInfinity, n_max: usize) -> CheckReport {
    let support = a.support();
    (1..=n_max).fold(CheckReport::empty(), |acc, n| {
        let results = tuples(&support, n)
            .par_iter()
            .map(|x| {
                let out_deg = degree_sum(x) + 3 - n as i64;
                if !output_has_room(a.space(), out_deg) || !within_window(x, a.certified_top()) {
                    return (0, None);
                }
                let residual = composite_sum(a, x, &|args| a.apply(args), a.max_arity());
                let violation = (!residual.is_zero()).then(|| Violation {
                    arity: n,
                    inputs: x.clone(),
                    degree: out_deg as i32,
                    residual,
                });
                (1, violation)
            })
            .collect();
        acc.merge(CheckReport::from_results(results))
    })
}

/// Components `f_n` of an A∞-morphism, `f_n` of degree `1 - n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismTable {
    pub n_max: usize,
    pub maps: BTreeMap<usize, OperationTable>,
}

impl MorphismTable {
    pub fn new(n_max: usize) -> Self {
        MorphismTable { n_max, maps: BTreeMap::new() }
    }

    /// The identity morphism of a space.
    pub fn identity(space: &GradedSpace, n_max: usize) -> Self {
        let mut f = MorphismTable::new(n_max);
        let table = f.maps.entry(1).or_default();
        for b in all_basis(space) {
            table.insert(vec![b], SparseVec::basis(b.1));
        }
        f
    }

    pub fn set(&mut self, inputs: Vec<BasisRef>, value: SparseVec) {
        store(&mut self.maps, inputs, value);
    }

    pub fn component(&self, inputs: &[BasisRef]) -> SparseVec {
        self.maps.get(&inputs.len()).and_then(|t| t.get(inputs)).cloned().unwrap_or_default()
    }

    pub fn apply(&self, inputs: &[(i32, &SparseVec)], p: Prime) -> SparseVec {
        let mut out = SparseVec::zero();
        if inputs.len() > self.n_max {
            return out;
        }
        for_each_basis_tensor(inputs, p, &mut |refs, c| out.add_scaled(&self.component(refs), c, p));
        out
    }
}

/// Ordered compositions of `n` into positive parts.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// `σ = Σ_{j=1}^{r-1} (r - j)(i_j - 1)` for the decomposition `i_1 + .. + i_r`.
pub fn morphism_sign_exponent(parts: &[usize]) -> i64 {
    let r = parts.len();
    parts.iter().enumerate().take(r.saturating_sub(1)).map(|(j, &i)| ((r - 1 - j) * (i - 1)) as i64).sum()
}

/// `m_r(f_{i_1} ⊗ .. ⊗ f_{i_r} ⊗ extra)` summed over decompositions of the
/// tensor `x`, with the sign `(-1)^σ` and Koszul signs.
fn tree_sum(
    p: Prime,
    x: &[BasisRef],
    f: &MorphismTable,
    outer: &dyn Fn(&[(i32, &SparseVec)]) -> SparseVec,
    outer_max: usize,
    extra: Option<(i32, &SparseVec)>,
) -> SparseVec {
    let n = x.len();
    let mut out = SparseVec::zero();
    for parts in compositions(n) {
        let r = parts.len();
        if r + usize::from(extra.is_some()) > outer_max || parts.iter().any(|&i| i > f.n_max) {
            continue;
        }
        // a trailing Id counts as a factor f_1 in σ
        let sign_parts = if extra.is_some() { [parts.as_slice(), &[1]].concat() } else { parts.clone() };
        let mut sign_exp = morphism_sign_exponent(&sign_parts);
        let mut values = Vec::with_capacity(r);
        let mut start = 0;
        let mut zero = false;
        for &i in &parts {
            let block = &x[start..start + i];
            sign_exp += (1 - i as i64) * degree_sum(&x[..start]);
            let v = f.component(block);
            if v.is_zero() {
                zero = true;
                break;
            }
            values.push(((degree_sum(block) + 1 - i as i64) as i32, v));
            start += i;
        }
        if zero {
            continue;
        }
        let mut args = borrow(&values);
        if let Some(e) = extra {
            args.push(e);
        }
        out.add_scaled(&outer(&args), p.sign(sign_exp), p);
    }
    out
}

/// Evaluates the morphism identities for `f : source -> target` in arities
/// `1..=n_max` on every basis tensor of the source support.
pub fn check_morphism(source: &dyn AInfinity, target: &dyn AInfinity, f: &MorphismTable, n_max: usize) -> CheckReport {
    let p = source.prime();
    let support = source.support();
    (1..=n_max).fold(CheckReport::empty(), |acc, n| {
        let results = tuples(&support, n)
            .par_iter()
            .map(|x| {
                let out_deg = degree_sum(x) + 2 - n as i64;
                if !output_has_room(target.space(), out_deg) || !within_window(x, source.certified_top()) {
                    return (0, None);
                }
                let mut residual = composite_sum(source, x, &|args| f.apply(args, p), f.n_max);
                let rhs = tree_sum(p, x, f, &|args| target.apply(args), target.max_arity(), None);
                residual.add_scaled(&rhs, p.neg(1), p);
                let violation = (!residual.is_zero()).then(|| Violation {
                    arity: n,
                    inputs: x.clone(),
                    degree: out_deg as i32,
                    residual,
                });
                (1, violation)
            })
            .collect();
        acc.merge(CheckReport::from_results(results))
    })
}

/// `m_n^op(a_1..a_n) = (-1)^{C(n,2) + 1 + Σ_{i<j}|a_i||a_j|} m_n(a_n..a_1)`.
pub fn opposite(a: &TableAInfinity) -> TableAInfinity {
    let p = a.p;
    let mut out = TableAInfinity { maps: BTreeMap::new(), ..a.clone() };
    for (&n, table) in &a.maps {
        let dest = out.maps.entry(n).or_default();
        for (inputs, value) in table {
            let reversed: Vec<BasisRef> = inputs.iter().rev().copied().collect();
            let mut e = (n * (n - 1) / 2 + 1) as i64;
            for i in 0..n {
                for j in i + 1..n {
                    e += reversed[i].0 as i64 * reversed[j].0 as i64;
                }
            }
            dest.insert(reversed, value.scaled(p.sign(e), p));
        }
    }
    out
}

/// Strict unit axioms: `m_2(1, x) = x = m_2(x, 1)` and `m_n` vanishes on
/// tensors containing the unit for `n != 2`, for `n <= n_max`.
pub fn check_strict_unitality(a: &dyn AInfinity, n_max: usize) -> CheckReport {
    let p = a.prime();
    let Some(unit) = a.unit() else {
        return CheckReport { passed: false, ..Default::default() };
    };
    let support = a.support();
    let mut results = Vec::new();
    for n in 1..=n_max.min(a.max_arity()) {
        for pos in 0..n {
            let others = tuples(&support, n - 1);
            results.extend(others.par_iter().map(|rest| {
                let mut args = vec_inputs(rest);
                args.insert(pos, (0, unit.clone()));
                let mut residual = a.apply(&borrow(&args));
                if n == 2 {
                    residual.add_term(rest[0].1, p.neg(1), p);
                }
                let mut witness = rest.clone();
                witness.insert(pos, (0, usize::MAX));
                let degree = (degree_sum(rest) + 2 - n as i64) as i32;
                (1, (!residual.is_zero()).then(|| Violation { arity: n, inputs: witness, degree, residual }))
            }).collect::<Vec<_>>());
        }
    }
    CheckReport::from_results(results)
}

/// Strict unitality of a morphism between strictly unital algebras:
/// `f_1(1) = 1` and `f_n` vanishes on tensors containing the unit for `n > 1`.
pub fn check_morphism_unitality(source: &dyn AInfinity, target: &dyn AInfinity, f: &MorphismTable, n_max: usize) -> CheckReport {
    let p = source.prime();
    let (Some(u), Some(v)) = (source.unit(), target.unit()) else {
        return CheckReport { passed: false, ..Default::default() };
    };
    let mut results = Vec::new();
    let mut f1 = f.apply(&[(0, &u)], p);
    f1.add_scaled(&v, p.neg(1), p);
    results.push((1, (!f1.is_zero()).then(|| Violation { arity: 1, inputs: vec![(0, usize::MAX)], degree: 0, residual: f1 })));
    let support = source.support();
    for n in 2..=n_max.min(f.n_max) {
        for pos in 0..n {
            for rest in tuples(&support, n - 1) {
                let mut args = vec_inputs(&rest);
                args.insert(pos, (0, u.clone()));
                let residual = f.apply(&borrow(&args), p);
                let mut witness = rest.clone();
                witness.insert(pos, (0, usize::MAX));
                let degree = (degree_sum(&rest) + 1 - n as i64) as i32;
                results.push((1, (!residual.is_zero()).then(|| Violation { arity: n, inputs: witness, degree, residual })));
            }
        }
    }
    CheckReport::from_results(results)
}

// ---------------------------------------------------------------------------
// modules

pub trait AInfinityModule: Sync {
    fn space(&self) -> &GradedSpace;
    fn max_arity(&self) -> usize;
    /// `ν_n(a_1..a_{n-1}, m)`, output in degree `Σ|a_k| + |m| + 2 - n`.
    fn action(&self, algebra_inputs: &[BasisRef], m: BasisRef) -> SparseVec;

    fn apply_action(&self, p: Prime, algebra_inputs: &[(i32, &SparseVec)], m: (i32, &SparseVec)) -> SparseVec {
        let mut out = SparseVec::zero();
        if algebra_inputs.len() + 1 > self.max_arity() {
            return out;
        }
        let mut all = algebra_inputs.to_vec();
        all.push(m);
        for_each_basis_tensor(&all, p, &mut |refs, c| {
            let (last, rest) = refs.split_last().expect("module input present");
            out.add_scaled(&self.action(rest, *last), c, p);
        });
        out
    }
}

/// An A∞-algebra as a module over itself, `ν_n = m_n`.
pub struct RegularModule<'a>(pub &'a dyn AInfinity);

impl AInfinityModule for RegularModule<'_> {
    fn space(&self) -> &GradedSpace {
        self.0.space()
    }

    fn max_arity(&self) -> usize {
        self.0.max_arity()
    }

    fn action(&self, algebra_inputs: &[BasisRef], m: BasisRef) -> SparseVec {
        let mut all = algebra_inputs.to_vec();
        all.push(m);
        self.0.operation(&all)
    }

    fn apply_action(&self, _p: Prime, algebra_inputs: &[(i32, &SparseVec)], m: (i32, &SparseVec)) -> SparseVec {
        let mut all = algebra_inputs.to_vec();
        all.push(m);
        self.0.apply(&all)
    }
}

/// A module given by tables: `maps[n]` maps `(a_1..a_{n-1}, m)` to `ν_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleTable {
    pub space: GradedSpace,
    pub n_max: usize,
    pub maps: BTreeMap<usize, BTreeMap<Vec<BasisRef>, SparseVec>>,
}

impl ModuleTable {
    pub fn new(space: GradedSpace, n_max: usize) -> Self {
        ModuleTable { space, n_max, maps: BTreeMap::new() }
    }

    /// Sets `ν_n`; the last entry of `inputs` is the module element.
    pub fn set(&mut self, inputs: Vec<BasisRef>, value: SparseVec) {
        store(&mut self.maps, inputs, value);
    }
}

impl AInfinityModule for ModuleTable {
    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn max_arity(&self) -> usize {
        self.n_max
    }

    fn action(&self, algebra_inputs: &[BasisRef], m: BasisRef) -> SparseVec {
        let mut key = algebra_inputs.to_vec();
        key.push(m);
        self.maps.get(&key.len()).and_then(|t| t.get(&key)).cloned().unwrap_or_default()
    }
}

/// Module Stasheff identities
/// `Σ (-1)^{r+st} ν_{r+1+t}(1^{⊗r} ⊗ m_s ⊗ 1^{⊗t}) = 0`, where the `t = 0`
/// terms read `ν_{r+1}(1^{⊗r} ⊗ ν_s)`.
pub fn check_module_stasheff(a: &dyn AInfinity, m: &dyn AInfinityModule, n_max: usize) -> CheckReport {
    let p = a.prime();
    let alg_support = a.support();
    let mod_support = all_basis(m.space());
    (1..=n_max).fold(CheckReport::empty(), |acc, n| {
        let mut keys = Vec::new();
        for alg in tuples(&alg_support, n - 1) {
            for &mm in &mod_support {
                keys.push((alg.clone(), mm));
            }
        }
        let results = keys
            .par_iter()
            .map(|(x, mm)| {
                let out_deg = degree_sum(x) + mm.0 as i64 + 3 - n as i64;
                if !output_has_room(m.space(), out_deg) || !within_window(x, a.certified_top()) {
                    return (0, None);
                }
                let residual = module_composite_sum(p, a, m, x, *mm);
                let mut inputs = x.clone();
                inputs.push(*mm);
                (1, (!residual.is_zero()).then(|| Violation { arity: n, inputs, degree: out_deg as i32, residual }))
            })
            .collect();
        acc.merge(CheckReport::from_results(results))
    })
}

fn module_composite_sum(p: Prime, a: &dyn AInfinity, m: &dyn AInfinityModule, x: &[BasisRef], mm: BasisRef) -> SparseVec {
    let n = x.len() + 1;
    let basis = vec_inputs(x);
    let mvec = SparseVec::basis(mm.1);
    let mut out = SparseVec::zero();
    for s in 1..=n {
        for r in 0..=n - s {
            let t = n - r - s;
            let sign = p.sign(r as i64 + (s * t) as i64 + s as i64 * degree_sum(&x[..r]));
            let value = if t >= 1 {
                if r + 1 + t > m.max_arity() || s > a.max_arity() {
                    continue;
                }
                let inner = a.apply(&borrow(&basis[r..r + s]));
                if inner.is_zero() {
                    continue;
                }
                let inner_deg = (degree_sum(&x[r..r + s]) + 2 - s as i64) as i32;
                let mut args = borrow(&basis[..r]);
                args.push((inner_deg, &inner));
                args.extend(borrow(&basis[r + s..]));
                m.apply_action(p, &args, (mm.0, &mvec))
            } else {
                if s > m.max_arity() || r + 1 > m.max_arity() {
                    continue;
                }
                let inner = m.apply_action(p, &borrow(&basis[r..]), (mm.0, &mvec));
                if inner.is_zero() {
                    continue;
                }
                let inner_deg = (degree_sum(&x[r..]) + mm.0 as i64 + 2 - s as i64) as i32;
                m.apply_action(p, &borrow(&basis[..r]), (inner_deg, &inner))
            };
            out.add_scaled(&value, sign, p);
        }
    }
    out
}

/// Restriction `f^*M` of a module over the target of `f` to its source:
/// `ν_n^A = Σ (-1)^σ ν_{r+1}^B(f_{i_1} ⊗ .. ⊗ f_{i_r} ⊗ Id)`, with `ν_1^A = ν_1^B`
/// and `σ` computed for the `r + 1` factors `i_1, .., i_r, 1`.
pub fn restrict_module(
    source: &dyn AInfinity,
    f: &MorphismTable,
    m: &dyn AInfinityModule,
    p: Prime,
    n_max: usize,
) -> Result<ModuleTable> {
    if n_max > f.n_max + 1 {
        return Err(Error::ArityOverflow { requested: n_max, bound: f.n_max + 1 });
    }
    let mut out = ModuleTable::new(m.space().clone(), n_max);
    let alg_support = source.support();
    let mod_support = all_basis(m.space());
    for n in 1..=n_max {
        let keys: Vec<(Vec<BasisRef>, BasisRef)> = tuples(&alg_support, n - 1)
            .into_iter()
            .flat_map(|x| mod_support.iter().map(move |&mm| (x.clone(), mm)))
            .collect();
        let values: Vec<(Vec<BasisRef>, SparseVec)> = keys
            .par_iter()
            .map(|(x, mm)| {
                let mvec = SparseVec::basis(mm.1);
                let value = if x.is_empty() {
                    m.action(&[], *mm)
                } else {
                    tree_sum(p, x, f, &|args| {
                        let (last, rest) = args.split_last().expect("module input present");
                        m.apply_action(p, rest, *last)
                    }, m.max_arity(), Some((mm.0, &mvec)))
                };
                let mut key = x.clone();
                key.push(*mm);
                (key, value)
            })
            .collect();
        for (k, v) in values {
            out.set(k, v);
        }
    }
    Ok(out)
}

/// Strict unitality of a module: `ν_2(1, m) = m` and `ν_n` vanishes when an
/// algebra input is the unit, `n != 2`.
pub fn check_module_unitality(a: &dyn AInfinity, m: &dyn AInfinityModule, n_max: usize) -> CheckReport {
    let p = a.prime();
    let Some(u) = a.unit() else {
        return CheckReport { passed: false, ..Default::default() };
    };
    let mut results = Vec::new();
    let alg_support = a.support();
    for n in 2..=n_max.min(m.max_arity()) {
        for pos in 0..n - 1 {
            for rest in tuples(&alg_support, n - 2) {
                for mm in all_basis(m.space()) {
                    let mut args = vec_inputs(&rest);
                    args.insert(pos, (0, u.clone()));
                    let mvec = SparseVec::basis(mm.1);
                    let mut residual = m.apply_action(p, &borrow(&args), (mm.0, &mvec));
                    if n == 2 {
                        residual.add_term(mm.1, p.neg(1), p);
                    }
                    let mut witness = rest.clone();
                    witness.insert(pos, (0, usize::MAX));
                    witness.push(mm);
                    let degree = (degree_sum(&rest) + mm.0 as i64 + 2 - n as i64) as i32;
                    results.push((1, (!residual.is_zero()).then(|| Violation { arity: n, inputs: witness, degree, residual })));
                }
            }
        }
    }
    CheckReport::from_results(results)
}

// ---------------------------------------------------------------------------
// homotopy transfer

/// Minimal model produced by [`transfer_minimal_model`] together with the
/// A∞-quasi-isomorphism `f : H -> A`.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub minimal: TableAInfinity,
    pub morphism: MorphismTable,
    /// Position in the full cohomology of each basis vector of `minimal`.
    pub embedding: Vec<BasisRef>,
}

/// Transfers the DGA structure of `a` to its cohomology along `split`.
///
/// Trees are generated by `λ_2 = m_2` and
/// `λ_n = Σ_{s=1}^{n-1} (-1)^{s+1} m_2(T_s ⊗ T_{n-s})`, where `T_1 = -i`,
/// `T_k = h λ_k i^{⊗k}` for `k >= 2`, and Koszul signs apply to `T_{n-s}`
/// (of degree `1 - (n - s)`) passing the first `s` inputs. Then
/// `μ_n = p λ_n i^{⊗n}`, `f_1 = i` and `f_n = -h λ_n i^{⊗n}`; the sign of
/// `f_n` is the one for which the morphism identities hold in the
/// convention of [`check_morphism`].
///
/// `support`, when given, lists the cohomology basis vectors to keep. With
/// `top = Some(t)` values of `μ_n` in degrees above `t` are dropped and the
/// result is certified in degrees `<= t`. Every kept value of `μ_n` must lie
/// in the span of the support, which is checked.
pub fn transfer_minimal_model(
    a: &dyn DgAlgebra,
    split: &CohomologySplitting,
    n_max: usize,
    support: Option<&[BasisRef]>,
    top: Option<i32>,
) -> Result<Transfer> {
    let p = a.prime();
    let h_space = split.cohomology();
    let embedding: Vec<BasisRef> = match support {
        Some(s) => {
            let mut v = s.to_vec();
            v.sort();
            v.dedup();
            v
        }
        None => all_basis(h_space),
    };
    // restricted space and index translation
    let mut per_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for &(d, i) in &embedding {
        if i >= h_space.dim(d) {
            return Err(Error::DegreeMismatch(format!("no cohomology class {i} in degree {d}")));
        }
        per_degree.entry(d).or_default().push(i);
    }
    let (lo, hi) = match (per_degree.keys().next(), per_degree.keys().last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0, 0),
    };
    let internal: Vec<Vec<i32>> = (lo..=hi)
        .map(|d| per_degree.get(&d).map_or(Vec::new(), |ix| ix.iter().map(|&i| h_space.locate(d, i).0).collect()))
        .collect();
    let sub_space = if h_space.is_bigraded() {
        GradedSpace::bigraded(lo, internal)
    } else {
        GradedSpace::new(lo, &internal.iter().map(Vec::len).collect::<Vec<_>>())
    };
    let to_full = |r: BasisRef| -> BasisRef { (r.0, per_degree[&r.0][r.1]) };
    let from_full: HashMap<BasisRef, BasisRef> = per_degree
        .iter()
        .flat_map(|(&d, ix)| ix.iter().enumerate().map(move |(j, &i)| ((d, i), (d, j))))
        .collect();
    let basis = all_basis(&sub_space);

    let include = |r: BasisRef| -> SparseVec {
        let (d, i) = to_full(r);
        split.include(d, i)
    };

    let mut minimal = TableAInfinity::new(p, sub_space.clone(), n_max);
    minimal.certified = top.map(|t| (lo, t));
    let mut morphism = MorphismTable::new(n_max);
    for &b in &basis {
        morphism.set(vec![b], include(b));
    }

    // T values for tuples of length k, keyed by the tuple
    let mut memo: Vec<HashMap<Vec<BasisRef>, SparseVec>> = vec![HashMap::new(); n_max + 1];
    for &b in &basis {
        memo[1].insert(vec![b], include(b).negated(p));
    }
    for n in 2..=n_max {
        let level: Vec<(Vec<BasisRef>, SparseVec, SparseVec)> = tuples(&basis, n)
            .into_par_iter()
            .filter_map(|x| {
                let mut lambda = SparseVec::zero();
                for s in 1..n {
                    let (Some(left), Some(right)) = (memo[s].get(&x[..s]), memo[n - s].get(&x[s..])) else {
                        continue;
                    };
                    let dl = (degree_sum(&x[..s]) + 1 - s as i64) as i32;
                    let dr = (degree_sum(&x[s..]) + 1 - (n - s) as i64) as i32;
                    let koszul = (1 - (n - s) as i64) * degree_sum(&x[..s]);
                    let sign = p.sign(s as i64 + 1 + koszul);
                    lambda.add_scaled(&a.multiply(dl, left, dr, right), sign, p);
                }
                if lambda.is_zero() {
                    return None;
                }
                let deg = (degree_sum(&x) + 2 - n as i64) as i32;
                let mu = split.project(deg, &lambda);
                let t = split.homotopy(deg, &lambda);
                Some((x, mu, t))
            })
            .collect();
        for (x, mu, t) in level {
            let deg = (degree_sum(&x) + 2 - n as i64) as i32;
            if !mu.is_zero() && top.is_none_or(|t| deg <= t) {
                let mut local = SparseVec::zero();
                for (&i, &c) in mu.iter() {
                    let Some(&(_, j)) = from_full.get(&(deg, i)) else {
                        return Err(Error::DegreeMismatch(format!(
                            "μ_{n} leaves the chosen support at degree {deg} (class {i})"
                        )));
                    };
                    local.add_term(j, c, p);
                }
                minimal.set(x.clone(), local)?;
            }
            if !t.is_zero() {
                morphism.set(x.clone(), t.negated(p));
                memo[n].insert(x, t);
            }
        }
    }

    // designate p(1) as the unit when it is a basis vector
    let unit_class = split.project(0, &a.unit());
    if unit_class.len() == 1 {
        let (&i, &c) = unit_class.iter().next().expect("one term");
        if c == 1 {
            minimal.unit = from_full.get(&(0, i)).copied();
        }
    }
    Ok(Transfer { minimal, morphism, embedding })
}
