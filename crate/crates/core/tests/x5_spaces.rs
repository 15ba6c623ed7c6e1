use std::collections::HashMap;

use nilforge::dyadic::{DyadicTorus, Z4};
use nilforge::poly::{degree_test, monomials, random_poly, PolyRep};
use nilforge::rho::klein;
use nilforge::table::{FuncTable, Phase};
use nilforge::x5::*;
use nilforge::z4poly::{build_r, z4_degree_by_differences, Z4Poly};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Another cubic lift `R + 2A` of `Q_1`, with `A` a random classical cubic.
fn other_lift(rr: &Z4Poly, rng: &mut ChaCha8Rng) -> Z4Poly {
    let n = rr.n();
    let extra = monomials(n, 3)
        .into_iter()
        .chain(std::iter::once(0))
        .filter(|_| rng.gen_bool(0.5))
        .map(|s| (s, Z4::new(2)));
    Z4Poly::new(n, rr.coeffs().iter().map(|(&s, &a)| (s, a)).chain(extra)).unwrap()
}

#[test]
fn explicit_lift_is_a_cube() {
    let mut r = rng(1);
    for n in 0..=2 {
        for _ in 0..6 {
            let q = QuadPair::random(n, &mut r);
            let s = lift(&q, 5).unwrap();
            let c = x5_cube_check(&q, &s, 5, 0, 0).unwrap();
            assert!(c.holds && c.exhaustive, "{q:?}");
        }
    }
    for n in 3..=6 {
        let q = QuadPair::random(n, &mut r);
        let s = lift(&q, 5).unwrap().with_cache();
        let c = x5_cube_check(&q, &s, 5, 10_000, n as u64).unwrap();
        assert!(c.holds && !c.exhaustive && c.checked == 10_000);
    }
}

#[test]
fn coset_law() {
    let mut r = rng(2);
    for trial in 0..50 {
        let n = 2 + trial % 4;
        let (q, s) = sample_ncube(n, 5, &mut r).unwrap();
        let mut s2 = lift(&q, 5).unwrap();
        s2.rr = other_lift(&s.rr, &mut r);
        assert!(z4_degree_by_differences(&s2.rr.to_table(), n, 3));
        s2.p = random_poly(n, 5, 5, &mut r);
        let c = x5_cube_check(&q, &s2, 5, 300, trial as u64).unwrap();
        assert!(c.holds);
        assert!(degree_test(&s.table().sub(&s2.table()), 5));
        // Adding a quintic keeps the cube.
        let p = random_poly(n, 5, 5, &mut r).to_table();
        assert!(x5_cube_check(&q, &s.table().add(&p), 5, 300, 7).unwrap().holds);
    }
}

#[test]
fn affine_q_in_one_dimension_accepts_everything() {
    let mut r = rng(3);
    for _ in 0..50 {
        let q = QuadPair::random(1, &mut r);
        let s = FuncTable::from_nums(1, 5, vec![r.gen_range(0..32), r.gen_range(0..32)]).unwrap();
        assert!(x5_cube_check(&q, &s, 5, 0, 0).unwrap().holds);
    }
}

#[test]
fn one_dimensional_samples_are_uniform() {
    let mut r = rng(4);
    let draws = 1_000_000u64;
    let cells = 16 * 32 * 32;
    let mut counts: HashMap<Vec<X5Point>, u64> = HashMap::new();
    for _ in 0..draws {
        let (q, s) = sample_ncube(1, 5, &mut r).unwrap();
        *counts.entry(vertices(&q, &s)).or_default() += 1;
    }
    assert_eq!(counts.len(), cells);
    let e = draws as f64 / cells as f64;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let df = (cells - 1) as f64;
    assert!((chi2 - df).abs() < 5.0 * (2.0 * df).sqrt(), "chi2 = {chi2}");
}

#[test]
fn sampling_is_deterministic() {
    let a = sample_ncube_seeded(8, 5, 42).unwrap();
    let b = sample_ncube_seeded(8, 5, 42).unwrap();
    assert_eq!(a, b);
    let c = sample_ncube_seeded(8, 5, 43).unwrap();
    assert_ne!(a.1, c.1);
}

#[test]
fn lift_binomial_identity() {
    // d^4 binom2(R) = Sym^2(d^2 Q_1) on every 4-cube for n <= 3, sampled at n = 4.
    let mut r = rng(5);
    for n in 1..=4usize {
        for _ in 0..8 {
            let q1 = random_poly(n, 2, 1, &mut r);
            let rr = build_r(&q1).unwrap();
            let mask = (1u32 << n) - 1;
            let tuples: Vec<[u32; 5]> = if n <= 3 {
                (0u32..1 << (5 * n)).map(|c| std::array::from_fn(|i| c >> (n * i) & mask)).collect()
            } else {
                (0..20_000).map(|_| std::array::from_fn(|_| r.gen::<u32>() & mask)).collect()
            };
            for t in tuples {
                let hs = [t[1], t[2], t[3], t[4]];
                assert_eq!(d4_binom2(&rr, t[0], &hs), sym2_d2q(&q1, &hs));
            }
        }
    }
}

#[test]
fn documented_r_lifts() {
    let quad = |terms: &[u32]| {
        PolyRep::new(2, 2, 1, DyadicTorus::ZERO, terms.iter().map(|&s| (s, DyadicTorus::HALF))).unwrap()
    };
    let vals = |p: &Z4Poly| p.to_table().iter().map(|a| a.value()).collect::<Vec<_>>();
    assert_eq!(vals(&build_r(&quad(&[0b11])).unwrap()), vec![0, 0, 0, 1]);
    assert!(build_r(&quad(&[])).unwrap().coeffs().is_empty());
    assert_eq!(vals(&build_r(&quad(&[0b01, 0b10])).unwrap()), vec![0, 1, 1, 2]);
}

#[test]
fn corners_complete() {
    let mut r = rng(6);
    for n in 1..=5 {
        let zero = vec![X5Point { q: 0, s: DyadicTorus::ZERO }; 1 << n];
        let full = x5_corner_complete(n, 5, &zero).unwrap();
        assert_eq!(full, zero);
    }
    for n in 1..=7 {
        for _ in 0..5 {
            let (q, s) = sample_ncube(n, 5, &mut r).unwrap();
            let v = vertices(&q, &s);
            let mut partial = v.clone();
            let top = partial.len() - 1;
            partial[top] = X5Point { q: r.gen_range(0..4), s: DyadicTorus::new(r.gen_range(0..32), 5).unwrap() };
            let done = x5_corner_complete(n, 5, &partial).unwrap();
            let (q2, s2) = split_vertices(n, &done).unwrap();
            assert!(x5_cube_check(&q2, &s2, 5, 500, 1).unwrap().holds);
            if n >= 6 {
                assert_eq!(done, v);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projection_and_affine_pullbacks(n in 3usize..9, m in 0usize..8, seed: u64) {
        let mut r = rng(seed);
        let (q, s) = sample_ncube(n, 5, &mut r).unwrap();
        let s = s.with_cache();
        let x2 = klein();
        // An affine map F_2^m -> F_2^n.
        let base = r.gen::<u32>() & ((1 << n) - 1);
        let cols: Vec<u32> = (0..m).map(|_| r.gen::<u32>() & ((1 << n) - 1)).collect();
        let embed = |a: u32| (0..m).fold(base, |acc, i| if a >> i & 1 == 1 { acc ^ cols[i] } else { acc });
        let qt: Vec<u64> = (0..1u32 << m).map(|a| q.eval(embed(a)) as u64).collect();
        prop_assert!(nilforge::cube::CubeSpace::is_cube(&x2, &qt));
        let qm = QuadPair::from_bits(m, &qt.iter().map(|&v| v as u8).collect::<Vec<_>>()).unwrap();
        let sm = FuncTable::from_fn(m, |a| s.eval(embed(a)));
        prop_assert!(x5_cube_check(&qm, &sm, 5, 400, seed).unwrap().holds);
    }
}
