//! Brute-force `h^i Hom•(I, J)` over F_2: enumerate every graded map of
//! degree `i`, keep the chain maps, and divide by the set of maps `d h + h d`
//! over all homotopies `h` of degree `i - 1`. Signs vanish in characteristic 2.

use std::collections::{BTreeMap, HashSet};

use koszul_core::graded::{CochainComplex, GradedSpace};
use koszul_core::{FpMatrix, Prime};

/// A complex of F_2-vector spaces: `dims[k]` sits in degree `min + k` and
/// `d[k]` is the `dims[k+1] × dims[k]` matrix of `d^{min+k}`.
#[derive(Debug, Clone)]
pub struct SmallComplex {
    pub name: &'static str,
    pub min: i32,
    pub dims: Vec<usize>,
    pub d: Vec<Vec<Vec<u8>>>,
}

impl SmallComplex {
    pub fn new(name: &'static str, min: i32, dims: &[usize], d: &[&[&[u8]]]) -> Self {
        let d: Vec<Vec<Vec<u8>>> = d.iter().map(|m| m.iter().map(|r| r.to_vec()).collect()).collect();
        SmallComplex { name, min, dims: dims.to_vec(), d }
    }

    fn dim(&self, deg: i32) -> usize {
        usize::try_from(deg - self.min).ok().and_then(|k| self.dims.get(k)).copied().unwrap_or(0)
    }

    fn max(&self) -> i32 {
        self.min + self.dims.len() as i32 - 1
    }

    /// `d^deg` as a dense 0/1 matrix, zero when absent.
    fn diff(&self, deg: i32) -> Vec<Vec<u8>> {
        let (r, c) = (self.dim(deg + 1), self.dim(deg));
        match usize::try_from(deg - self.min).ok().and_then(|k| self.d.get(k)) {
            Some(m) if r > 0 && c > 0 => m.clone(),
            _ => vec![vec![0; c]; r],
        }
    }

    pub fn to_cochain(&self) -> CochainComplex {
        let p = Prime::new(2).unwrap();
        let full: BTreeMap<i32, FpMatrix> = (0..self.d.len())
            .filter(|&k| self.dims[k] > 0 && self.dims[k + 1] > 0)
            .map(|k| {
                let rows: Vec<Vec<i64>> = self.d[k].iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
                (self.min + k as i32, FpMatrix::from_rows(&rows, self.dims[k], p).unwrap())
            })
            .collect();
        CochainComplex::from_full(p, GradedSpace::new(self.min, &self.dims), &full).unwrap()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

type Mat = Vec<Vec<u8>>;

fn mul(a: &Mat, b: &Mat, rows: usize, cols: usize) -> Mat {
    let inner = b.len();
    (0..rows).map(|r| (0..cols).map(|c| (0..inner).fold(0, |acc, k| acc ^ (a[r][k] & b[k][c]))).collect()).collect()
}

fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u ^ v).collect()).collect()
}

/// Blocks `I^q -> J^{q+i}` of a degree-`i` map, for `q` in the support of `I`.
fn blocks(i_: &SmallComplex, j: &SmallComplex, deg: i32) -> Vec<(i32, usize, usize)> {
    (i_.min..=i_.max()).map(|q| (q, j.dim(q + deg), i_.dim(q))).collect()
}

fn unpack(bits: u64, shape: &[(i32, usize, usize)]) -> BTreeMap<i32, Mat> {
    let mut k = 0;
    shape
        .iter()
        .map(|&(q, r, c)| {
            let m = (0..r)
                .map(|_| {
                    (0..c)
                        .map(|_| {
                            let b = (bits >> k & 1) as u8;
                            k += 1;
                            b
                        })
                        .collect()
                })
                .collect();
            (q, m)
        })
        .collect()
}

fn block<'a>(f: &'a BTreeMap<i32, Mat>, q: i32, r: usize, c: usize, zero: &'a mut Mat) -> &'a Mat {
    match f.get(&q) {
        Some(m) => m,
        None => {
            *zero = vec![vec![0; c]; r];
            zero
        }
    }
}

/// `d_J f - f d_I` for a degree-`deg` map `f`, flattened.
fn boundary_of(i_: &SmallComplex, j: &SmallComplex, deg: i32, f: &BTreeMap<i32, Mat>) -> Vec<u8> {
    let mut out = Vec::new();
    for q in i_.min - 1..=i_.max() {
        let (src, dst) = (i_.dim(q), j.dim(q + deg + 1));
        if src == 0 || dst == 0 {
            continue;
        }
        let (mut z1, mut z2) = (Vec::new(), Vec::new());
        let fq = block(f, q, j.dim(q + deg), src, &mut z1);
        let fq1 = block(f, q + 1, dst, i_.dim(q + 1), &mut z2);
        let left = mul(&j.diff(q + deg), fq, dst, src);
        let right = mul(fq1, &i_.diff(q), dst, src);
        out.extend(add(&left, &right).into_iter().flatten());
    }
    out
}

/// `d_J h + h d_I` for a degree-`deg - 1` map `h`, as a degree-`deg` map, flattened.
fn null_homotopic(i_: &SmallComplex, j: &SmallComplex, deg: i32, h: &BTreeMap<i32, Mat>) -> Vec<u8> {
    let mut out = Vec::new();
    for q in i_.min..=i_.max() {
        let (src, dst) = (i_.dim(q), j.dim(q + deg));
        let (mut z1, mut z2) = (Vec::new(), Vec::new());
        let hq = block(h, q, j.dim(q + deg - 1), src, &mut z1);
        let hq1 = block(h, q + 1, dst, i_.dim(q + 1), &mut z2);
        let left = mul(&j.diff(q + deg - 1), hq, dst, src);
        let right = mul(hq1, &i_.diff(q), dst, src);
        out.extend(add(&left, &right).into_iter().flatten());
    }
    out
}

pub const MAX_BITS: usize = 22;

/// `dim_F2` of chain maps `I -> J[deg]` modulo homotopy, by enumeration.
pub fn brute_force_dim(i_: &SmallComplex, j: &SmallComplex, deg: i32) -> usize {
    let shape = blocks(i_, j, deg);
    let bits: usize = shape.iter().map(|&(_, r, c)| r * c).sum();
    let hshape = blocks(i_, j, deg - 1);
    let hbits: usize = hshape.iter().map(|&(_, r, c)| r * c).sum();
    assert!(bits <= MAX_BITS && hbits <= MAX_BITS, "{} -> {} in degree {deg} is too large to enumerate", i_.name, j.name);
    let cycles = (0..1u64 << bits).filter(|&b| boundary_of(i_, j, deg, &unpack(b, &shape)).iter().all(|&x| x == 0)).count();
    let boundaries: HashSet<Vec<u8>> = (0..1u64 << hbits).map(|b| null_homotopic(i_, j, deg, &unpack(b, &hshape))).collect();
    assert_eq!(cycles % boundaries.len(), 0);
    let quotient = cycles / boundaries.len();
    assert!(quotient.is_power_of_two());
    quotient.trailing_zeros() as usize
}

/// Degrees in which `Hom•(I, J)` can be nonzero.
pub fn hom_degrees(i_: &SmallComplex, j: &SmallComplex) -> std::ops::RangeInclusive<i32> {
    (j.min - i_.max())..=(j.max() - i_.min)
}

pub fn catalog() -> Vec<SmallComplex> {
    vec![
        SmallComplex::new("k", 0, &[1], &[]),
        SmallComplex::new("k[-1]", 1, &[1], &[]),
        SmallComplex::new("cone(id)", 0, &[1, 1], &[&[&[1]]]),
        SmallComplex::new("k2->k", 0, &[2, 1], &[&[&[1, 1]]]),
        SmallComplex::new("k->k2->k", -1, &[1, 2, 1], &[&[&[1], &[0]], &[&[0, 1]]]),
        SmallComplex::new("k+k[-1]", 0, &[1, 1], &[&[&[0]]]),
        SmallComplex::new("k2->k2 rank 1", 0, &[2, 2], &[&[&[1, 1], &[0, 0]]]),
        SmallComplex::new("k3", 0, &[3], &[]),
        SmallComplex::new("gap", -1, &[1, 0, 1], &[&[], &[]]),
        SmallComplex::new(
            "k2->k2->k2",
            -1,
            &[2, 2, 2],
            &[&[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 1]]],
        ),
    ]
}
