use nilforge::dyadic::{binom2, DyadicTorus, Z4};
use nilforge::poly::{
    degree_test, degree_test_by_differences, derivative, exact_root, invert_one_plus_shift,
    poly_product, random_poly_seeded, PolyRep,
};
use nilforge::table::FuncTable;
use proptest::prelude::*;

fn table_strategy(n: usize, level: u8) -> impl Strategy<Value = FuncTable> {
    prop::collection::vec(0u64..(1u64 << level), 1 << n)
        .prop_map(move |v| FuncTable::from_nums(n, level, v).unwrap())
}

fn z4_table(n: usize) -> impl Strategy<Value = Vec<Z4>> {
    prop::collection::vec(0i64..4, 1 << n).prop_map(|v| v.into_iter().map(Z4::new).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn degree_test_agrees_with_brute_force(t in table_strategy(3, 3), k in -1i32..5) {
        prop_assert_eq!(degree_test(&t, k), degree_test_by_differences(&t, k));
    }

    #[test]
    fn random_polys_pass_and_roundtrip(n in 0usize..7, d in 0usize..6, level in 1u8..7, seed: u64) {
        let p = random_poly_seeded(n, d, level, seed);
        let t = p.to_table();
        prop_assert!(degree_test(&t, d as i32));
        let back = PolyRep::from_table(&t, d).unwrap();
        prop_assert_eq!(back.to_table(), t);
        prop_assert_eq!(PolyRep::from_text(&p.to_text()).unwrap().to_table(), p.to_table());
    }

    #[test]
    fn sparse_derivative_matches_table(n in 1usize..7, d in 0usize..6, seed: u64, h: u32) {
        let p = random_poly_seeded(n, d, 6, seed);
        let h = h & ((1 << n) - 1);
        prop_assert_eq!(derivative(&p, h).to_table(), p.to_table().derivative(h));
    }

    #[test]
    fn derivative_lowers_degree(n in 1usize..6, d in 1usize..6, seed: u64, h: u32) {
        let p = random_poly_seeded(n, d, 8, seed);
        let h = h & ((1 << n) - 1);
        prop_assert!(degree_test(&p.to_table().derivative(h), d as i32 - 1));
    }

    #[test]
    fn doubling_lowers_degree(n in 1usize..6, d in 1usize..6, seed: u64) {
        let p = random_poly_seeded(n, d, 8, seed);
        let t = p.to_table().scale(2).sub(&FuncTable::from_fn(n, |_| p.alpha().mul_int(2)));
        prop_assert!(degree_test(&t, d as i32 - 1));
    }

    #[test]
    fn second_difference_along_h(t in table_strategy(3, 4), h in 0u32..8) {
        let dd = t.derivative(h).derivative(h);
        prop_assert_eq!(dd, t.derivative(h).scale(-2));
    }

    #[test]
    fn repeated_directions_commute(t in table_strategy(3, 4), h1 in 0u32..8, h2 in 0u32..8) {
        let a = t.derivative(h1).derivative(h1).derivative(h2);
        let b = t.derivative(h2).derivative(h2).derivative(h1);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn difference_cocycle_identity(t in table_strategy(3, 4), h in 0u32..8, k in 0u32..8) {
        let lhs = t.derivative(h ^ k);
        let rhs = t.derivative(h).add(&t.derivative(k).shift(h));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_rule_mod4(f in z4_table(3), g in z4_table(3), h in 0usize..8) {
        for x in 0..8usize {
            let fg = |y: usize| f[y] * g[y];
            let lhs = fg(x ^ h) - fg(x);
            let rhs = (f[x ^ h] - f[x]) * g[x] + f[x ^ h] * (g[x ^ h] - g[x]);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn binomial_difference_rule(f in z4_table(3), h in 0usize..8) {
        for x in 0..8usize {
            let df = f[x ^ h] - f[x];
            let lhs = (binom2(f[x ^ h]) + 2 - binom2(f[x])) % 2;
            let rhs = (binom2(df) + (f[x] * df).value()) % 2;
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn exact_root_halves(n in 0usize..7, d in 0usize..6, level in 0u8..8, seed: u64) {
        let p = random_poly_seeded(n, d, level, seed);
        let q = exact_root(&p).unwrap();
        prop_assert_eq!(q.degree(), d + 1);
        prop_assert!(degree_test(&q.to_table(), d as i32 + 1));
        prop_assert_eq!(q.to_table().scale(2), p.to_table());
    }

    #[test]
    fn invert_solves_shift_equation(n in 1usize..6, d in 0usize..5, seed: u64, e in 1u32..32) {
        let e = e & ((1 << n) - 1);
        prop_assume!(e != 0);
        let j = e.trailing_zeros();
        let base = random_poly_seeded(n, d, 6, seed).to_table();
        // Pull back along the projection x -> x + x_j e, which kills e.
        let t = FuncTable::from_fn(n, |x| base.get(if x >> j & 1 == 1 { x ^ e } else { x }));
        let p = PolyRep::from_table(&t, d).unwrap();
        let q = invert_one_plus_shift(&p, e).unwrap();
        let qt = q.to_table();
        prop_assert!(degree_test(&qt, d as i32 + 1));
        prop_assert_eq!(qt.add(&qt.shift(e)), t);
    }

    #[test]
    fn product_is_pointwise(n in 1usize..7, d1 in 0usize..4, d2 in 0usize..4, s1: u64, s2: u64) {
        let a = random_poly_seeded(n, d1, 1, s1);
        let b = random_poly_seeded(n, d2, 1, s2);
        let c = poly_product(&a, &b).unwrap();
        prop_assert!(degree_test(&c.to_table(), (d1 + d2) as i32));
        for x in 0..1u32 << n {
            let v = a.eval(x).num() * b.eval(x).num();
            prop_assert_eq!(c.eval(x), DyadicTorus::new(v as i128, 1).unwrap());
        }
    }
}
