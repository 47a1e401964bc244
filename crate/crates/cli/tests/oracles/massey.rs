//! Triple Massey product `<y, y, y>` over `F_p[x]/(x^3)` by direct matrix
//! arithmetic in the End DGA of the bar resolution, without the transfer trees.

use koszul_core::ainfinity::AInfinity;
use koszul_core::hom::DgAlgebra;
use koszul_core::model::{minimal_model, ModelInput};
use koszul_core::sparse::SparseVec;
use koszul_core::Prime;

#[derive(Debug)]
pub struct MasseyComparison {
    pub p: u32,
    pub mu3_nonzero: bool,
    /// The Massey product is a nonzero class.
    pub massey_nonzero: bool,
    /// `c` with `<y, y, y> = c · μ_3(y, y, y)` in cohomology, as a signed residue.
    pub coefficient: Option<i64>,
}

/// With `a` a cocycle representing `y` (so `a a` is exact since `y^2 = 0`),
/// solves `d u = a a` and takes the class of `u a + a u`. The class of `μ_3`
/// is carried into the End DGA by `f_1`.
pub fn compare(p: u32) -> MasseyComparison {
    let prime = Prime::new(p).unwrap();
    let m = minimal_model(prime, ModelInput::PowerOfVariable { n: 3, length: 4 }, 3).unwrap();
    let end = &m.end;
    let h = &m.transfer.minimal;
    assert_eq!((h.space.dim(1), h.space.dim(2)), (1, 1), "Ext^1 and Ext^2 are lines");

    let a = m.transfer.morphism.component(&[(1, 0)]);
    assert!(end.differential(1, &a).is_zero(), "f_1(y) is a cocycle");
    let n2 = end.space().dim(2);
    let d1 = end.complex().differential(1);
    let exact = |v: &SparseVec| d1.solve(&v.to_dense(n2)).is_ok();

    let aa = end.multiply(1, &a, 1, &a);
    let u = SparseVec::from_dense(&d1.solve(&aa.to_dense(n2)).expect("y^2 = 0, so a a is exact"));
    let mut w = end.multiply(1, &u, 1, &a);
    w.add_scaled(&end.multiply(1, &a, 1, &u), 1, prime);
    assert!(end.differential(2, &w).is_zero(), "u a + a u is a cocycle");

    let mu3 = h.operation(&[(1, 0), (1, 0), (1, 0)]);
    let t = m.transfer.morphism.apply(&[(2, &mu3)], prime);
    let coefficient = (0..p)
        .find(|&c| {
            let mut r = w.clone();
            r.add_scaled(&t, prime.neg(c), prime);
            exact(&r)
        })
        .map(|c| prime.signed(c));
    MasseyComparison { p, mu3_nonzero: !mu3.is_zero(), massey_nonzero: !exact(&w), coefficient }
}
