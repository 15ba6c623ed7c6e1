use nilforge::coboundary::{
    decide_coboundary, pair_with_coboundary, verify_certificate, CubeSource, Decision, Target,
};
use nilforge::cocycle::{
    check_2homog, check_cocycle_axioms, coboundary_of, trilinear_cocycle, CocycleHandle,
};
use nilforge::cube::FilteredGroup;
use nilforge::dyadic::DyadicTorus;
use nilforge::poly::{degree_test, random_poly_seeded, reduce_mod_poly};
use nilforge::potential::{edge_index, potential_finder, strong_potential_finder};
use nilforge::table::FuncTable;
use proptest::prelude::*;

fn table(n: usize, level: u8) -> impl Strategy<Value = FuncTable> {
    prop::collection::vec(0u64..(1u64 << level), 1 << n)
        .prop_map(move |v| FuncTable::from_nums(n, level, v).unwrap())
}

fn d_table(rho: &CocycleHandle, f: &FuncTable) -> bool {
    // d^{k+1} f = rho on every (k+1)-cube of D^1(F_2^n).
    let n = f.n();
    let k1 = rho.k + 1;
    let other = coboundary_of(FilteredGroup::f2(n, 1), rho.k, f);
    (0u64..1 << (n * (k1 + 1))).all(|code| {
        let x = code & ((1 << n) - 1);
        let hs: Vec<u64> = (0..k1).map(|i| code >> (n * (i + 1)) & ((1 << n) - 1)).collect();
        other.eval_at(x, &hs) == rho.eval_at(x, &hs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn potentials_of_coboundaries(n in 1usize..4, k in 0usize..5, f in table(3, 4)) {
        let f = FuncTable::from_values(n, &f.values()[..1 << n]);
        let rho = coboundary_of(FilteredGroup::f2(n, 1), k, &f);
        let p = potential_finder(&rho, 1000, 1).unwrap();
        prop_assert!(d_table(&rho, &p.table));
        prop_assert!(p.level <= rho.level + k as u8);
        // The potential differs from f by a polynomial of degree k.
        prop_assert!(degree_test(&p.table.sub(&f), k as i32));
        let v = decide_coboundary(&rho, Target::Torus, CubeSource::Exhaustive).unwrap();
        prop_assert_eq!(v.decision, Decision::Yes);
        let v = decide_coboundary(&rho, Target::Level(f.level().max(1)), CubeSource::Exhaustive).unwrap();
        prop_assert_eq!(v.decision, Decision::Yes);
    }

    #[test]
    fn coboundaries_are_homogeneous_cocycles(k in 2usize..4, f in table(2, 5)) {
        let rho = coboundary_of(FilteredGroup::f2(2, 1), k, &f);
        let h = check_2homog(&rho, 0, 0).unwrap();
        prop_assert!(h.holds && h.exhaustive);
        let a = check_cocycle_axioms(&rho, 200, 4);
        prop_assert!(a.passed(), "{:?}", a.first_failure);
    }

    #[test]
    fn twisting_by_a_coboundary_keeps_the_verdict(f in table(2, 3)) {
        let base = trilinear_cocycle();
        let g = FilteredGroup::f2(2, 1);
        let gg = g.clone();
        let ff = f.clone();
        let twisted = CocycleHandle::new(g, 2, 3, move |h| {
            let d = nilforge::cocycle::alternating_sum(&gg.tuple(h), |p| ff.get(p as u32));
            base.eval_params(h) + d
        });
        let v = decide_coboundary(&twisted, Target::Torus, CubeSource::Exhaustive).unwrap();
        prop_assert_eq!(v.decision, Decision::No);
        let cert = v.certificate.unwrap();
        prop_assert!(verify_certificate(&twisted, &cert));
        // A kernel vector pairs to zero with every coboundary.
        prop_assert!(pair_with_coboundary(&twisted.space, &cert, &f).is_zero());
        prop_assert!(potential_finder(&twisted, 0, 0).is_err());
    }

    #[test]
    fn reduction_is_a_canonical_coset_representative(t in table(4, 6), k in -1i32..5, seed: u64) {
        let p = random_poly_seeded(4, k.max(0) as usize, 6, seed).to_table();
        let p = if k < 0 { FuncTable::zeros(4) } else { p };
        let r = reduce_mod_poly(&t, k);
        prop_assert_eq!(&reduce_mod_poly(&t.add(&p), k), &r);
        prop_assert!(degree_test(&t.sub(&r), k));
        prop_assert!(r.level() <= t.add(&p).level());
    }

    #[test]
    fn strong_potentials_are_half_valued(n in 1usize..3, k in 3usize..5, a in table(2, 1), seed: u64) {
        let a = FuncTable::from_values(n, &a.values()[..1 << n]);
        let b = random_poly_seeded(n, k, 2, seed).to_table();
        let f = a.add(&b);
        let psi = FuncTable::from_fn(2 * n, |e| {
            let (x, h) = (e & ((1 << n) - 1), e >> n);
            f.get(x ^ h) - f.get(x)
        });
        prop_assert_eq!(psi.get(edge_index(n, 1, 1 % (1 << n))), f.get(0) - f.get(1));
        let rho = coboundary_of(FilteredGroup::f2(n, 1), k, &f);
        let s = strong_potential_finder(&rho, &psi, 1000, seed).unwrap();
        prop_assert!(s.table.level() <= 1);
        prop_assert!(d_table(&rho, &s.table));
    }
}

#[test]
fn perturbed_cocycle_is_reported() {
    let f = FuncTable::from_fn(2, |x| DyadicTorus::new(x as i128, 3).unwrap());
    let good = coboundary_of(FilteredGroup::f2(2, 1), 1, &f);
    let bad_cube = vec![0u64, 1, 2, 0];
    let target = bad_cube.clone();
    let bad = CocycleHandle::new(FilteredGroup::f2(2, 1), 1, 3, move |h| {
        let v = good.eval_params(h);
        if h == target.as_slice() { v + DyadicTorus::HALF } else { v }
    });
    let r = check_cocycle_axioms(&bad, 100, 1);
    assert!(!r.passed());
    let msg = r.first_failure.unwrap();
    assert!(msg.contains("[0, 1, 2, 0]"));
}

#[test]
fn strong_finder_rejects_a_bad_witness() {
    // d^4 of |x_1|/16 is (1/2)Z/Z-valued but has no (1/2)Z/Z potential.
    let f = FuncTable::from_fn(1, |x| DyadicTorus::new(x as i128, 4).unwrap());
    let rho = coboundary_of(FilteredGroup::f2(1, 1), 3, &f);
    assert!((0..4).all(|c| rho.eval_at(c & 1, &[c >> 1; 4]).level() <= 1));
    let psi = FuncTable::from_fn(2, |e| f.get((e & 1) ^ (e >> 1)) - f.get(e & 1));
    let err = strong_potential_finder(&rho, &psi, 100, 0).unwrap_err();
    assert!(err.to_string().contains("2 psi"), "{err}");
    let v = decide_coboundary(&rho, Target::Level(1), CubeSource::Exhaustive).unwrap();
    assert_eq!(v.decision, Decision::No);
    let v = decide_coboundary(&rho, Target::Torus, CubeSource::Exhaustive).unwrap();
    assert_eq!(v.decision, Decision::Yes);
    // A witness breaking rho = d^3 psi is caught first.
    let g = FuncTable::from_fn(2, |x| DyadicTorus::new((x & 1) as i128, 1).unwrap());
    let rho2 = coboundary_of(FilteredGroup::f2(2, 1), 3, &g);
    let mut vals = FuncTable::from_fn(4, |e| g.get((e & 3) ^ (e >> 2)) - g.get(e & 3)).values();
    vals[edge_index(2, 3, 1) as usize] += DyadicTorus::new(1, 2).unwrap();
    let err = strong_potential_finder(&rho2, &FuncTable::from_values(4, &vals), 100, 0).unwrap_err();
    assert!(err.to_string().contains("d^3 psi"), "{err}");
}
