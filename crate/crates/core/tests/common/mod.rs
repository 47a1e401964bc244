#![allow(dead_code)]

use std::collections::BTreeMap;

use koszul_core::graded::{CochainComplex, GradedSpace};
use koszul_core::{FpMatrix, Prime};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of a random complex: dimensions per degree (starting at degree 0)
/// and the rank of each differential.
#[derive(Debug, Clone)]
pub struct Shape {
    pub p: u32,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub seed: u64,
}

impl Shape {
    pub fn prime(&self) -> Prime {
        Prime::new(self.p).unwrap()
    }

    /// `dim H^j = n_j - r_j - r_{j-1}`.
    pub fn betti(&self) -> Vec<usize> {
        (0..self.dims.len())
            .map(|j| {
                let out = self.ranks.get(j).copied().unwrap_or(0);
                let inc = if j == 0 { 0 } else { self.ranks[j - 1] };
                self.dims[j] - out - inc
            })
            .collect()
    }
}

pub fn shape(primes: Vec<u32>, max_len: usize, max_dim: usize, max_total: usize) -> impl Strategy<Value = Shape> {
    (prop::sample::select(primes), prop::collection::vec(0..=max_dim, 1..=max_len), any::<u64>(), any::<u64>())
        .prop_filter("total dimension", move |(_, dims, _, _)| {
            let t: usize = dims.iter().sum();
            t > 0 && t <= max_total
        })
        .prop_map(|(p, dims, rank_seed, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(rank_seed);
            let mut ranks = Vec::new();
            let mut incoming = 0;
            for j in 0..dims.len().saturating_sub(1) {
                let r = rng.gen_range(0..=(dims[j] - incoming).min(dims[j + 1]));
                ranks.push(r);
                incoming = r;
            }
            Shape { p, dims, ranks, seed }
        })
}

fn random_invertible(n: usize, p: Prime, rng: &mut ChaCha8Rng) -> (FpMatrix, FpMatrix) {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..p.value() as i64)).collect()).collect();
        let g = FpMatrix::from_rows(&rows, n, p).unwrap();
        if let Some(inv) = g.inverse() {
            return (g, inv);
        }
    }
}

/// The standard complex of the given shape, in which `d_j` sends basis vector
/// `r_{j-1} + t` to basis vector `t`, conjugated by random changes of basis.
pub fn random_complex(s: &Shape) -> CochainComplex {
    let p = s.prime();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let changes: Vec<(FpMatrix, FpMatrix)> = s.dims.iter().map(|&n| random_invertible(n, p, &mut rng)).collect();
    let mut full = BTreeMap::new();
    let mut incoming = 0;
    for (j, &r) in s.ranks.iter().enumerate() {
        let mut d = FpMatrix::zeros(s.dims[j + 1], s.dims[j], p);
        for t in 0..r {
            d.set(t, incoming + t, 1);
        }
        incoming = r;
        let conj = changes[j + 1].0.mul(&d).unwrap().mul(&changes[j].1).unwrap();
        full.insert(j as i32, conj);
    }
    CochainComplex::from_full(p, GradedSpace::new(0, &s.dims), &full).unwrap()
}
