use nilforge::dyadic::DyadicTorus;
use nilforge::gowers::*;
use nilforge::poly::{random_poly, random_poly_seeded};
use nilforge::rho::Rho;
use nilforge::table::FuncTable;
use nilforge::x5::sample_ncube_seeded;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_table(n: usize, level: u8, rng: &mut ChaCha8Rng) -> FuncTable {
    FuncTable::from_nums(n, level, (0..1 << n).map(|_| rng.gen()).collect()).unwrap()
}

#[test]
fn engines_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [3, 4] {
        for i in 0..20 {
            let f = if i % 2 == 0 {
                random_table(n, 5, &mut rng)
            } else {
                sample_ncube_seeded(n, 5, rng.gen()).unwrap().1.table()
            };
            let a = gowers_norm_naive(&f, 5).unwrap();
            let b = gowers_norm_recursive(&f, 5).unwrap();
            assert!((a - b).abs() <= 1e-9, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn polynomial_phases_have_norm_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let p = random_poly(4, 5, 5, &mut rng);
        assert!(poly_norm_one_certificate(&p, 5));
        assert!((gowers_norm_recursive(&p.to_table(), 5).unwrap() - 1.0).abs() < 1e-9);
    }
    let sextic = nilforge::PolyRep::new(3, 6, 5, DyadicTorus::ZERO, [(0b11, DyadicTorus::new(1, 5).unwrap())]).unwrap();
    assert!(!poly_norm_one_certificate(&sextic, 5));
}

#[test]
fn invariances_and_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [3, 4] {
        for _ in 0..5 {
            let f = random_table(n, 4, &mut rng);
            for k in 0..=3 {
                let base = gowers_norm_recursive(&f, k).unwrap();
                let a: u32 = rng.gen_range(0..1 << n);
                let shifted = f.shift(a);
                assert!((gowers_norm_recursive(&shifted, k).unwrap() - base).abs() < 1e-9);
                let p = random_poly(n, k, 6, &mut rng).to_table();
                assert!((gowers_norm_recursive(&f.add(&p), k).unwrap() - base).abs() < 1e-9);
                if k > 0 {
                    assert!(gowers_norm_recursive(&f, k - 1).unwrap() <= base + 1e-9);
                }
            }
        }
    }
    // Multiplying e(S) by a quadratic phase leaves U^6 unchanged.
    for seed in 0..4 {
        let s = sample_ncube_seeded(4, 5, seed).unwrap().1.table();
        let q = random_poly_seeded(4, 2, 1, seed + 100).to_table();
        let a = gowers_norm_recursive(&s, 5).unwrap();
        let b = gowers_norm_recursive(&s.add(&q), 5).unwrap();
        assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn limit_constant_matches_brute_force() {
    let c = limit_constant();
    assert_eq!(c.mean_numerator, rho_character_sum(&Rho::standard()));
    assert!(c.mean > 0.0 && c.c_star < 1.0);
}

#[test]
fn pseudo_quintic_correlates_about_half() {
    let mut total = 0.0;
    for seed in 0..20 {
        let (_, s) = sample_ncube_seeded(12, 5, seed).unwrap();
        let s = s.with_cache();
        let c = correlation(&s, &s.p).unwrap();
        let (num, den) = c.exact.unwrap();
        assert!((c.magnitude - (num as f64 / den as f64).abs()).abs() < 1e-12);
        total += c.magnitude;
        let shifted = s.table().add_const(DyadicTorus::HALF);
        assert!((correlation(&shifted, &s.p).unwrap().magnitude - c.magnitude).abs() < 1e-12);
    }
    let mean = total / 20.0;
    assert!((0.35..=0.65).contains(&mean), "{mean}");
}
