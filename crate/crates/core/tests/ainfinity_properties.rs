use koszul_core::ainfinity::{
    all_basis, check_stasheff, check_strict_unitality, opposite, restrict_module, BasisRef, RegularModule, TableAInfinity,
    DgaAsAInfinity,
};
use koszul_core::graded::GradedSpace;
use koszul_core::json;
use koszul_core::model::{minimal_model, ModelInput};
use koszul_core::sparse::SparseVec;
use koszul_core::Prime;
use proptest::prelude::*;

/// Arbitrary operation tables (not necessarily satisfying Stasheff) on a
/// bigraded space in degrees `0..dims.len()`.
fn table() -> impl Strategy<Value = TableAInfinity> {
    (
        prop::sample::select(vec![3u32, 5, 7]),
        prop::collection::vec(1usize..=2, 2..=3),
        prop::collection::vec((2usize..=4, any::<u64>(), 1i64..7), 0..12),
        prop::bool::ANY,
    )
        .prop_map(|(p, dims, entries, with_unit)| {
            let p = Prime::new(p).unwrap();
            let internal: Vec<Vec<i32>> = dims.iter().enumerate().map(|(d, &n)| (0..n).map(|j| -(d as i32) - j as i32).collect()).collect();
            let space = GradedSpace::bigraded(0, internal);
            let basis = all_basis(&space);
            let mut a = TableAInfinity::new(p, space.clone(), 4);
            for (n, seed, c) in entries {
                let mut s = seed;
                let inputs: Vec<BasisRef> = (0..n)
                    .map(|_| {
                        let b = basis[(s % basis.len() as u64) as usize];
                        s /= basis.len() as u64;
                        b
                    })
                    .collect();
                let deg = inputs.iter().map(|x| x.0).sum::<i32>() + 2 - n as i32;
                if space.dim(deg) == 0 {
                    continue;
                }
                let idx = (s % space.dim(deg) as u64) as usize;
                a.set(inputs, SparseVec::from_pairs([(idx, c)], p)).unwrap();
            }
            if with_unit {
                a.unit = Some((0, 0));
            }
            a.certified = Some((0, dims.len() as i32 - 1));
            a
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn json_round_trip_is_exact(a in table()) {
        let v = json::ainfinity_to_json(&a);
        let text = json::to_string(&v);
        let back = json::ainfinity_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(json::to_string(&json::ainfinity_to_json(&back)), text);
    }

    #[test]
    fn opposite_is_an_involution(a in table()) {
        prop_assert_eq!(opposite(&opposite(&a)), a);
    }

    #[test]
    fn planted_unit_defect_is_located(x in 0usize..2, y in 0usize..2, c in 1i64..3) {
        // the minimal model of Ext over S(V), d = 2: exterior on two classes of degree 1
        let m = minimal_model(Prime::new(3).unwrap(), ModelInput::Koszul { d: 2, cap: 3 }, 4).unwrap();
        let mut h = m.transfer.minimal.clone();
        prop_assert!(check_strict_unitality(&h, 4).passed);
        let unit = h.unit.unwrap();
        h.set(vec![unit, (1, x), (1, y)], SparseVec::from_pairs([(0, c)], h.p)).unwrap();
        let r = check_strict_unitality(&h, 4);
        prop_assert!(!r.passed);
        let w = &r.violations[0];
        prop_assert_eq!(w.arity, 3);
        prop_assert_eq!(&w.inputs[1..], &[(1, x), (1, y)][..]);
    }
}

#[test]
fn transferred_model_documents_round_trip() {
    let p = Prime::new(3).unwrap();
    let m = minimal_model(p, ModelInput::PowerOfVariable { n: 3, length: 4 }, 3).unwrap();
    let h = &m.transfer.minimal;
    let text = json::to_string(&json::ainfinity_to_json(h));
    let back = json::ainfinity_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert!(check_stasheff(&back, 3).passed);
    assert_eq!(json::to_string(&json::ainfinity_to_json(&back)), text);

    // the identity morphism and the restriction of the regular module
    let f = koszul_core::ainfinity::MorphismTable::identity(&h.space, 3);
    let v = json::morphism_to_json(h, h, &f);
    let (s, t, g) = json::morphism_from_json(&v).unwrap();
    assert_eq!((&s, &t, &g), (h, h, &f));

    let end = DgaAsAInfinity(&m.end);
    let restricted = restrict_module(h, &m.transfer.morphism, &RegularModule(&end), p, 3).unwrap();
    let small = koszul_core::ainfinity::ModuleTable { space: h.space.clone(), n_max: 2, maps: Default::default() };
    let v = json::module_to_json(h, &small);
    assert_eq!(json::module_from_json(&v).unwrap(), (h.clone(), small));
    assert!(restricted.n_max >= 3);
}

#[test]
fn malformed_documents_name_the_location() {
    let cases = [
        (r#"{"kind":"ainfinity","p":3,"n_max":2,"dims":{"0":1}}"#, "schema"),
        (r#"{"schema":"koszul-ainfty/1","kind":"ainfinity","p":4,"n_max":2,"dims":{"0":1}}"#, "$.p"),
        (r#"{"schema":"koszul-ainfty/1","kind":"ainfinity","p":3,"n_max":2,"dims":{"x":1}}"#, "$.dims"),
        (
            r#"{"schema":"koszul-ainfty/1","kind":"ainfinity","p":3,"n_max":2,"dims":{"0":1},"maps":{"m2":[{"in":[[0,0],[0,3]],"out":[0,0],"c":1}]}}"#,
            "$.maps.m2[0].in[1]",
        ),
        (
            r#"{"schema":"koszul-ainfty/1","kind":"ainfinity","p":3,"n_max":2,"dims":{"0":1},"maps":{"m3":[]}}"#,
            "$.maps.m3",
        ),
    ];
    for (text, location) in cases {
        let err = json::ainfinity_from_json(&serde_json::from_str(text).unwrap()).unwrap_err().to_string();
        assert!(err.contains(location), "{err} should mention {location}");
    }
}
