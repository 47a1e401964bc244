//! Free resolutions of the trivial module `k` over monomial algebras.
//!
//! Resolutions are free complexes in degrees `-L..=0` with `P^0 -> k` the
//! augmentation (left implicit).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, Prime};
use crate::free::{FreeComplex, Generator, Term};
use crate::graded::{CochainComplex, GradedSpace};
use crate::monomial::{monomial_label, GradedSymmetricAlgebra, MonomialAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionKind {
    Bar,
    NormalizedBar,
    Koszul,
    Minimal,
}

#[derive(Debug, Clone)]
pub struct Resolution {
    complex: Arc<FreeComplex>,
    length: usize,
    kind: ResolutionKind,
    // internal degrees up to which the algebra truncation is invisible
    certified_internal: Option<i32>,
}

/// Cohomology of the underlying complex of a resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    /// `dim h^{-i}` summed over the certified internal degrees.
    pub cohomology: BTreeMap<i32, usize>,
    /// True when `h^0 = k` and `h^{-i} = 0` for `0 < i < L` on certified blocks.
    pub exact: bool,
}

impl Resolution {
    pub fn complex(&self) -> &Arc<FreeComplex> {
        &self.complex
    }

    pub fn algebra(&self) -> &Arc<MonomialAlgebra> {
        self.complex.algebra()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn kind(&self) -> ResolutionKind {
        self.kind
    }

    pub fn certified_internal(&self) -> Option<i32> {
        self.certified_internal
    }

    pub fn exactness(&self) -> ExactnessReport {
        let u = self.complex.underlying();
        let mut cohomology: BTreeMap<i32, usize> = u.space().degrees().map(|d| (d, 0)).collect();
        for ((deg, w), n) in u.cohomology_dims() {
            if self.certified_internal.map_or(true, |c| w <= c) {
                *cohomology.entry(deg).or_default() += n;
            }
        }
        let l = self.length as i32;
        let exact = cohomology.get(&0) == Some(&1) && (1..l).all(|i| cohomology.get(&-i).copied().unwrap_or(0) == 0);
        ExactnessReport { cohomology, exact }
    }
}

fn words(letters: &[usize], len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |&l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

/// The bar resolution `P^{-i} = A ⊗ A'^{⊗i}` with `A' = A` (plain) or the
/// augmentation ideal (normalized), differential
/// `d(a_0[a_1|..|a_i]) = a_0 a_1[a_2|..] + Σ_k (-1)^k a_0[..|a_k a_{k+1}|..] + (-1)^i a_0[a_1|..|a_{i-1}] ε(a_i)`.
pub fn bar_resolution(algebra: Arc<MonomialAlgebra>, length: usize, normalized: bool) -> Result<Resolution> {
    if length < 1 {
        return Err(Error::BadLength(length));
    }
    let a = &algebra;
    let letters: Vec<usize> = if normalized { (1..a.dim()).collect() } else { (0..a.dim()).collect() };
    let mut gens = Vec::new();
    let mut diff = Vec::new();
    let mut all_words: Vec<Vec<Vec<usize>>> = Vec::new();
    for i in (0..=length).rev() {
        all_words.push(words(&letters, i));
    }
    let index: Vec<HashMap<Vec<usize>, usize>> = all_words
        .iter()
        .map(|ws| ws.iter().enumerate().map(|(j, w)| (w.clone(), j)).collect())
        .collect();
    let p = a.prime();
    for (k, ws) in all_words.iter().enumerate() {
        let i = length - k;
        gens.push(
            ws.iter()
                .map(|w| Generator {
                    internal: w.iter().map(|&m| a.weight(m)).sum(),
                    label: format!("[{}]", w.iter().map(|&m| a.label(m)).collect::<Vec<_>>().join("|")),
                })
                .collect::<Vec<_>>(),
        );
        if i == 0 {
            continue;
        }
        let next = &index[k + 1];
        diff.push(
            ws.iter()
                .map(|w| {
                    let mut terms = vec![Term { target: next[&w[1..].to_vec()], monomial: w[0], coeff: 1 }];
                    for j in 1..i {
                        if let Some(m) = a.product(w[j - 1], w[j]) {
                            let mut merged = w[..j - 1].to_vec();
                            merged.push(m);
                            merged.extend_from_slice(&w[j + 1..]);
                            if let Some(&t) = next.get(&merged) {
                                terms.push(Term { target: t, monomial: a.unit(), coeff: p.sign(j as i64) });
                            }
                        }
                    }
                    if a.augmentation(w[i - 1]) == 1 {
                        terms.push(Term { target: next[&w[..i - 1].to_vec()], monomial: a.unit(), coeff: p.sign(i as i64) });
                    }
                    terms
                })
                .collect(),
        );
    }
    let complex = FreeComplex::new(algebra, -(length as i32), gens, diff)?;
    let kind = if normalized { ResolutionKind::NormalizedBar } else { ResolutionKind::Bar };
    Ok(Resolution { complex: Arc::new(complex), length, kind, certified_internal: None })
}

/// The Koszul resolution `K^{-i} = S(V) ⊗ Λ^i V` over `S(V)` truncated at total
/// degree `cap`, with `d(e_J) = Σ_a (-1)^{a+1} X_{j_a} e_{J \ j_a}`. The
/// generator `e_J` has internal degree `|J|`.
pub fn koszul_resolution(d: usize, p: Prime, cap: u32) -> Result<Resolution> {
    if d < 1 {
        return Err(Error::InvalidInput("d must be at least 1".into()));
    }
    if (cap as usize) < d {
        return Err(Error::InvalidInput(format!("truncation {cap} is below d = {d}")));
    }
    let s = GradedSymmetricAlgebra::new(p, d, cap)?;
    let algebra = Arc::new(s.into_algebra());
    let subsets: Vec<Vec<Vec<usize>>> = (0..=d).rev().map(|i| subsets_of_size(d, i)).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> =
        subsets.iter().map(|ss| ss.iter().enumerate().map(|(j, s)| (s.clone(), j)).collect()).collect();
    let gens = subsets
        .iter()
        .map(|ss| {
            ss.iter()
                .map(|s| Generator {
                    internal: s.len() as i32,
                    label: if s.is_empty() {
                        "1".into()
                    } else {
                        s.iter().map(|j| format!("e{}", j + 1)).collect::<Vec<_>>().join("^")
                    },
                })
                .collect()
        })
        .collect();
    let mut diff = Vec::new();
    for (k, ss) in subsets.iter().enumerate().take(d) {
        diff.push(
            ss.iter()
                .map(|s| {
                    s.iter()
                        .enumerate()
                        .map(|(a, &j)| {
                            let mut rest = s.clone();
                            rest.remove(a);
                            Term {
                                target: index[k + 1][&rest],
                                monomial: algebra.variable(j).expect("cap is at least 1"),
                                coeff: p.sign(a as i64),
                            }
                        })
                        .collect()
                })
                .collect(),
        );
    }
    let complex = FreeComplex::new(algebra, -(d as i32), gens, diff)?;
    Ok(Resolution { complex: Arc::new(complex), length: d, kind: ResolutionKind::Koszul, certified_internal: Some(cap as i32) })
}

/// The periodic minimal resolution of `k` over `F_p[x]/(x^n)`, alternating
/// multiplication by `x` and `x^{n-1}`.
pub fn minimal_resolution_xn(p: Prime, n: u32, length: usize) -> Result<Resolution> {
    if length < 1 {
        return Err(Error::BadLength(length));
    }
    if n < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    let algebra = Arc::new(MonomialAlgebra::power_of_variable(p, n)?);
    let x = algebra.variable(0).expect("n >= 2");
    let top = algebra.index_of(&[n - 1]).expect("x^{n-1} survives");
    let internal = |i: usize| ((i / 2) * n as usize + i % 2) as i32;
    let gens = (0..=length).rev().map(|i| vec![Generator { internal: internal(i), label: format!("g{i}") }]).collect();
    let diff = (1..=length)
        .rev()
        .map(|i| vec![vec![Term { target: 0, monomial: if i % 2 == 1 { x } else { top }, coeff: 1 }]])
        .collect();
    let complex = FreeComplex::new(algebra, -(length as i32), gens, diff)?;
    Ok(Resolution { complex: Arc::new(complex), length, kind: ResolutionKind::Minimal, certified_internal: None })
}

fn subsets_of_size(d: usize, i: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for j in start..d {
            cur.push(j);
            go(j + 1, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, i, &mut Vec::new(), &mut out);
    out
}

/// Ordered decompositions of the exponent vector `alpha` into `len` nonzero parts.
fn compositions(alpha: &[u32], len: usize) -> Vec<Vec<Vec<u32>>> {
    if len == 0 {
        return if alpha.iter().all(|&a| a == 0) { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut part = vec![0u32; alpha.len()];
    loop {
        // advance `part` through all vectors 0 <= part <= alpha
        let mut k = 0;
        while k < alpha.len() {
            if part[k] < alpha[k] {
                part[k] += 1;
                break;
            }
            part[k] = 0;
            k += 1;
        }
        if k == alpha.len() {
            break;
        }
        let rest: Vec<u32> = alpha.iter().zip(&part).map(|(a, b)| a - b).collect();
        for mut tail in compositions(&rest, len - 1) {
            tail.insert(0, part.clone());
            out.push(tail);
        }
    }
    out.sort();
    out
}

/// The normalized bar cochains `Hom_k(Ā^{⊗i}, k)` of `F_p[X_1..X_d]` restricted to
/// multidegree `alpha`, in cochain degrees `0..=max_len`. Coboundary:
/// `(δf)(a_1|..|a_{i+1}) = Σ_{k=1}^{i} (-1)^k f(..|a_k a_{k+1}|..)`.
///
/// Over a truncation `(X)^N` with `N > |alpha|` no product in this block is
/// truncated, so the block is the same for the truncation and for the
/// polynomial ring.
pub fn bar_cochains(p: Prime, alpha: &[u32], max_len: usize) -> CochainComplex {
    let total: u32 = alpha.iter().sum();
    let by_len: Vec<Vec<Vec<Vec<u32>>>> =
        (0..=max_len + 1).map(|i| if i as u32 > total { Vec::new() } else { compositions(alpha, i) }).collect();
    let space = GradedSpace::new(0, &by_len[..=max_len].iter().map(Vec::len).collect::<Vec<_>>());
    let mut full = BTreeMap::new();
    for i in 0..max_len {
        let cols: HashMap<&Vec<Vec<u32>>, usize> = by_len[i].iter().enumerate().map(|(j, w)| (w, j)).collect();
        let rows = &by_len[i + 1];
        let mut m = FpMatrix::zeros(rows.len(), cols.len(), p);
        for (r, w) in rows.iter().enumerate() {
            for k in 1..=i {
                let mut merged: Vec<Vec<u32>> = w[..k - 1].to_vec();
                merged.push(w[k - 1].iter().zip(&w[k]).map(|(a, b)| a + b).collect());
                merged.extend_from_slice(&w[k + 1..]);
                m.add_to(r, cols[&merged], p.sign(k as i64));
            }
        }
        full.insert(i as i32, m);
    }
    CochainComplex::from_full(p, space, &full).expect("coboundary shapes match")
}

/// All exponent vectors in `d` variables with total degree in `1..=max_total`.
pub fn multidegrees(d: usize, max_total: u32) -> Vec<Vec<u32>> {
    let a = MonomialAlgebra::new(Prime::new(2).expect("2 is prime"), d, crate::monomial::Truncation::TotalDegree(max_total + 1))
        .expect("positive truncation");
    (1..a.dim()).map(|i| a.exponents(i).to_vec()).collect()
}

/// Dimensions of `Ext^i` of the trivial module over the truncated polynomial
/// algebra, summed over the multidegrees with `|alpha| <= max_internal`,
/// computed from normalized bar cochains.
pub fn bar_ext_dims(p: Prime, d: usize, max_degree: usize, max_internal: u32) -> Vec<usize> {
    let mut out = vec![0usize; max_degree + 1];
    out[0] = 1;
    let alphas = multidegrees(d, max_internal);
    let parts: Vec<Vec<usize>> = alphas
        .par_iter()
        .map(|alpha| {
            let c = bar_cochains(p, alpha, max_degree + 1);
            let betti = c.betti();
            (0..=max_degree).map(|i| betti.get(&(i as i32)).copied().unwrap_or(0)).collect()
        })
        .collect();
    for part in parts {
        for (o, x) in out.iter_mut().zip(part) {
            *o += x;
        }
    }
    out
}

/// Label of a word in exponent vectors, for diagnostics.
pub fn word_label(w: &[Vec<u32>]) -> String {
    format!("[{}]", w.iter().map(|e| monomial_label(e)).collect::<Vec<_>>().join("|"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn bar_over_ground_field_alternates() {
        let r = bar_resolution(Arc::new(MonomialAlgebra::trivial(pr(5))), 4, false).unwrap();
        let u = r.complex().underlying();
        assert_eq!(u.space().dims(), vec![1; 5]);
        let ds: Vec<u32> = (-4..0).map(|d| u.differential(d).get(0, 0)).collect();
        // d on P^{-i} is the identity for i even and zero for i odd
        assert_eq!(ds, vec![1, 0, 1, 0]);
    }

    #[test]
    fn bar_dimensions_over_dual_numbers() {
        let a = Arc::new(MonomialAlgebra::power_of_variable(pr(2), 2).unwrap());
        let r = bar_resolution(a, 2, false).unwrap();
        assert_eq!(r.complex().underlying().space().dims(), vec![8, 4, 2]);
        assert!(r.exactness().exact);
        assert!(bar_resolution(Arc::new(MonomialAlgebra::trivial(pr(3))), 0, false).is_err());
    }

    #[test]
    fn normalized_bar_is_exact() {
        for n in 2..=4 {
            let a = Arc::new(MonomialAlgebra::power_of_variable(pr(3), n).unwrap());
            assert!(bar_resolution(a, 4, true).unwrap().exactness().exact);
        }
        let a = Arc::new(MonomialAlgebra::truncated_polynomial(pr(3), 2, 3).unwrap());
        assert!(bar_resolution(a, 3, true).unwrap().exactness().exact);
    }

    #[test]
    fn koszul_small_cases() {
        let k1 = koszul_resolution(1, pr(5), 3).unwrap();
        let t = k1.complex().differential_of(-1, 0);
        assert_eq!(t, &[Term { target: 0, monomial: 1, coeff: 1 }]);
        let k2 = koszul_resolution(2, pr(5), 2).unwrap();
        assert_eq!((-2..=0).map(|d| k2.complex().rank(d)).collect::<Vec<_>>(), vec![1, 2, 1]);
        // d(e1^e2) = X1 e2 - X2 e1
        let terms = k2.complex().differential_of(-2, 0);
        let x1 = k2.algebra().variable(0).unwrap();
        let x2 = k2.algebra().variable(1).unwrap();
        let gens = k2.complex().generators(-1);
        let as_labels: Vec<(String, usize, u32)> =
            terms.iter().map(|t| (gens[t.target].label.clone(), t.monomial, t.coeff)).collect();
        assert!(as_labels.contains(&("e2".into(), x1, 1)));
        assert!(as_labels.contains(&("e1".into(), x2, 4)));
    }

    #[test]
    fn koszul_exact_per_block() {
        for d in 1..=3 {
            let r = koszul_resolution(d, pr(3), 2 * d as u32).unwrap();
            assert!(r.exactness().exact, "d = {d}");
        }
    }

    #[test]
    fn minimal_resolution_matches_bar_on_ext() {
        let r = minimal_resolution_xn(pr(3), 3, 5).unwrap();
        assert!(r.exactness().exact);
        let gens: Vec<i32> = (-5..=0).rev().map(|d| r.complex().generators(d)[0].internal).collect();
        assert_eq!(gens, vec![0, 1, 3, 4, 6, 7]);
    }

    #[test]
    fn bar_cochains_give_exterior_dimensions() {
        // Ext over F_3[X1, X2]: 1, 2, 1, 0
        assert_eq!(bar_ext_dims(pr(3), 2, 3, 4), vec![1, 2, 1, 0]);
        assert_eq!(bar_ext_dims(pr(5), 1, 2, 3), vec![1, 1, 0]);
    }

    #[test]
    fn composition_counts() {
        // ordered decompositions of (1,1) into 2 nonzero parts: (1,0)(0,1) and (0,1)(1,0)
        assert_eq!(compositions(&[1, 1], 2).len(), 2);
        // x^3 into 2 parts: 1+2, 2+1
        assert_eq!(compositions(&[3], 2).len(), 2);
        assert_eq!(word_label(&compositions(&[2], 1)[0]), "[x^2]");
    }
}
