//! Bounded complexes of finitely generated free modules over a monomial algebra.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, Prime};
use crate::graded::{CochainComplex, GradedSpace};
use crate::monomial::MonomialAlgebra;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub internal: i32,
    pub label: String,
}

/// `coeff * monomial * target` in the next degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub target: usize,
    pub monomial: usize,
    pub coeff: u32,
}

#[derive(Debug, Clone)]
pub struct FreeComplex {
    algebra: Arc<MonomialAlgebra>,
    min_degree: i32,
    gens: Vec<Vec<Generator>>,
    diff: Vec<Vec<Vec<Term>>>,
    // for each generator g, the terms (source, monomial, coeff) of d(source) involving g
    incoming: Vec<Vec<Vec<(usize, usize, u32)>>>,
}

impl FreeComplex {
    /// `gens[k]` are the generators in degree `min_degree + k`; `diff[k][g]` is
    /// `d(g)` expressed in the generators of the next degree.
    pub fn new(
        algebra: Arc<MonomialAlgebra>,
        min_degree: i32,
        gens: Vec<Vec<Generator>>,
        mut diff: Vec<Vec<Vec<Term>>>,
    ) -> Result<Self> {
        diff.resize(gens.len(), Vec::new());
        let p = algebra.prime();
        for (k, ds) in diff.iter_mut().enumerate() {
            ds.resize(gens[k].len(), Vec::new());
            let next = gens.get(k + 1).map_or(0, Vec::len);
            for (g, terms) in ds.iter_mut().enumerate() {
                let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
                for t in terms.iter() {
                    if t.target >= next || t.monomial >= algebra.dim() {
                        return Err(Error::ShapeMismatch(format!(
                            "differential of generator {g} in degree {} leaves the complex",
                            min_degree + k as i32
                        )));
                    }
                    if algebra.weight(t.monomial) + gens[k + 1][t.target].internal != gens[k][g].internal {
                        return Err(Error::InvalidInput("differential does not preserve internal degree".into()));
                    }
                    let e = merged.entry((t.target, t.monomial)).or_insert(0);
                    *e = p.add(*e, t.coeff % p.value());
                }
                *terms = merged
                    .into_iter()
                    .filter(|&(_, c)| c != 0)
                    .map(|((target, monomial), coeff)| Term { target, monomial, coeff })
                    .collect();
            }
        }
        let mut incoming: Vec<Vec<Vec<(usize, usize, u32)>>> = gens.iter().map(|g| vec![Vec::new(); g.len()]).collect();
        for (k, ds) in diff.iter().enumerate() {
            for (g, terms) in ds.iter().enumerate() {
                for t in terms {
                    incoming[k + 1][t.target].push((g, t.monomial, t.coeff));
                }
            }
        }
        let fc = FreeComplex { algebra, min_degree, gens, diff, incoming };
        fc.check_square_zero()?;
        Ok(fc)
    }

    /// A complex of vector spaces viewed as free modules over the ground field.
    pub fn from_cochain(c: &CochainComplex) -> Result<Self> {
        let algebra = Arc::new(MonomialAlgebra::trivial(c.prime()));
        let space = c.space();
        let mut gens = Vec::new();
        let mut diff = Vec::new();
        for deg in space.degrees() {
            gens.push(
                space
                    .internal_degrees(deg)
                    .iter()
                    .enumerate()
                    .map(|(j, &w)| Generator {
                        internal: w,
                        label: space.label(deg, j).map_or_else(|| format!("e{deg}_{j}"), str::to_string),
                    })
                    .collect(),
            );
            let m = c.differential(deg);
            diff.push(
                (0..m.cols())
                    .map(|j| {
                        (0..m.rows())
                            .filter(|&r| m.get(r, j) != 0)
                            .map(|r| Term { target: r, monomial: 0, coeff: m.get(r, j) })
                            .collect()
                    })
                    .collect(),
            );
        }
        Self::new(algebra, space.min_degree(), gens, diff)
    }

    fn check_square_zero(&self) -> Result<()> {
        let p = self.prime();
        for k in 0..self.gens.len().saturating_sub(2) {
            for g in 0..self.gens[k].len() {
                let mut acc: BTreeMap<(usize, usize), u32> = BTreeMap::new();
                for t in &self.diff[k][g] {
                    for u in &self.diff[k + 1][t.target] {
                        if let Some(m) = self.algebra.product(t.monomial, u.monomial) {
                            let e = acc.entry((u.target, m)).or_insert(0);
                            *e = p.add(*e, p.mul(t.coeff, u.coeff));
                        }
                    }
                }
                if acc.values().any(|&c| c != 0) {
                    let deg = self.min_degree + k as i32;
                    return Err(Error::MalformedComplex { degree: deg, next: deg + 1 });
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<MonomialAlgebra> {
        &self.algebra
    }

    pub fn prime(&self) -> Prime {
        self.algebra.prime()
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.gens.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.min_degree..=self.max_degree()
    }

    fn slot(&self, deg: i32) -> Option<usize> {
        let k = deg - self.min_degree;
        (k >= 0 && (k as usize) < self.gens.len()).then_some(k as usize)
    }

    pub fn generators(&self, deg: i32) -> &[Generator] {
        self.slot(deg).map_or(&[], |k| &self.gens[k])
    }

    pub fn rank(&self, deg: i32) -> usize {
        self.generators(deg).len()
    }

    pub fn differential_of(&self, deg: i32, g: usize) -> &[Term] {
        self.slot(deg).map_or(&[], |k| &self.diff[k][g])
    }

    /// Terms `(source, monomial, coeff)` with `d(source) ∋ coeff * monomial * g`,
    /// where `g` sits in degree `deg` and `source` in degree `deg - 1`.
    pub fn incoming(&self, deg: i32, g: usize) -> &[(usize, usize, u32)] {
        self.slot(deg).map_or(&[], |k| &self.incoming[k][g])
    }

    /// The complex of F_p-vector spaces underneath: basis `monomial * generator`,
    /// ordered generator-major.
    pub fn underlying(&self) -> CochainComplex {
        let a = &self.algebra;
        let n = a.dim();
        let p = self.prime();
        let internal: Vec<Vec<i32>> = self
            .gens
            .iter()
            .map(|gs| gs.iter().flat_map(|g| (0..n).map(move |m| g.internal + a.weight(m))).collect())
            .collect();
        let labels: Vec<Vec<String>> = self
            .gens
            .iter()
            .map(|gs| gs.iter().flat_map(|g| (0..n).map(move |m| format!("{}*{}", a.label(m), g.label))).collect())
            .collect();
        let space = GradedSpace::bigraded(self.min_degree, internal);
        let space = space.clone().with_labels(labels).unwrap_or(space);
        let mut full = BTreeMap::new();
        for (k, ds) in self.diff.iter().enumerate() {
            let Some(next) = self.gens.get(k + 1) else { continue };
            let mut m = FpMatrix::zeros(next.len() * n, self.gens[k].len() * n, p);
            for (g, terms) in ds.iter().enumerate() {
                for t in terms {
                    for mono in 0..n {
                        if let Some(prod) = a.product(mono, t.monomial) {
                            m.add_to(t.target * n + prod, g * n + mono, t.coeff);
                        }
                    }
                }
            }
            full.insert(self.min_degree + k as i32, m);
        }
        CochainComplex::from_full(p, space, &full).expect("free complex is internally consistent")
    }
}
