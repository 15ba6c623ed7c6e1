use std::collections::{BTreeSet, HashMap};

use nilforge::dyadic::DyadicTorus;
use nilforge::experiments::*;
use nilforge::poly::degree_test;
use nilforge::table::{FuncTable, Phase};
use nilforge::x5::{lift, sample_ncube_seeded, x5_cube_check, QuadPair, X5Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every `(Q, S)` on `F_2^{M+d}` agreeing with the frame, kept when
/// `S - lift(Q)` has degree <= 5.
fn brute_sigma(frame: &RestrictionFrame) -> BTreeSet<Vec<X5Point>> {
    let dim = frame.m + frame.d;
    let size = 1usize << dim;
    let face = frame.base.len();
    let free = size - face;
    let mut out = BTreeSet::new();
    for qcode in 0..1usize << (2 * free) {
        let qv: Vec<u8> = (0..size)
            .map(|x| if x < face { frame.base[x].q } else { (qcode >> (2 * (x - face)) & 3) as u8 })
            .collect();
        let q = QuadPair::from_bits(dim, &qv).unwrap();
        let s0 = lift(&q, 5).unwrap().table();
        for scode in 0..1u64 << (5 * free) {
            let s = FuncTable::from_fn(dim, |x| {
                let x = x as usize;
                if x < face {
                    frame.base[x].s
                } else {
                    DyadicTorus::new((scode >> (5 * (x - face)) & 31) as i128, 5).unwrap()
                }
            });
            if degree_test(&s.sub(&s0), 5) {
                out.insert((0..size).map(|x| X5Point { q: qv[x], s: s.eval(x as u32) }).collect());
            }
        }
    }
    out
}

fn sampled_frame(n: usize, m: usize, d: usize, seed: u64) -> RestrictionFrame {
    let (q, s) = sample_ncube_seeded(n, 5, seed).unwrap();
    RestrictionFrame::from_cube(&q, &s, m, d)
}

#[test]
fn sigma_matches_brute_force() {
    for (m, d, seed) in [(1, 1, 1), (1, 1, 2), (0, 1, 3), (0, 2, 4), (2, 0, 5), (1, 0, 6)] {
        let frame = sampled_frame(6, m, d, seed);
        let sigma = enumerate_sigma(&frame).unwrap();
        let brute = brute_sigma(&frame);
        let ours: BTreeSet<Vec<X5Point>> = sigma.elements.iter().cloned().collect();
        assert_eq!(ours.len(), sigma.len());
        assert_eq!(ours, brute, "M={m} d={d}");
    }
}

#[test]
fn sigma_elements_are_cubes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (m, d) in [(1, 1), (0, 2)] {
        let sigma = enumerate_sigma(&sampled_frame(8, m, d, 11)).unwrap();
        for _ in 0..40 {
            let e = &sigma.elements[rng.gen_range(0..sigma.len())];
            let q = QuadPair::from_bits(m + d, &e.iter().map(|p| p.q).collect::<Vec<_>>()).unwrap();
            let s = FuncTable::from_fn(m + d, |x| e[x as usize].s);
            let c = x5_cube_check(&q, &s, 5, 0, 0).unwrap();
            assert!(c.holds && c.exhaustive);
        }
    }
}

#[test]
fn sigma_size_does_not_depend_on_n() {
    for n in [2, 4, 8, 12] {
        let sigma = enumerate_sigma(&sampled_frame(n, 1, 1, n as u64)).unwrap();
        assert_eq!(sigma.len(), 8192);
    }
}

#[test]
fn uniform_sigma_pushes_forward_to_uniform_q() {
    for (m, d) in [(1, 1), (0, 2), (2, 0)] {
        let sigma = enumerate_sigma(&sampled_frame(7, m, d, 9)).unwrap();
        let mut marg: HashMap<Vec<u8>, usize> = HashMap::new();
        for e in &sigma.elements {
            *marg.entry(e.iter().map(|p| p.q).collect()).or_default() += 1;
        }
        assert_eq!(marg.len(), sigma.q_count);
        assert!(marg.values().all(|&c| c == sigma.k_size));
    }
}

#[test]
fn samples_land_in_sigma_and_are_deterministic() {
    let a = estimate_tv(10, 1, 1, 20_000, 3).unwrap();
    assert_eq!(a.outside_sigma, 0);
    assert!(a.calibrated());
    let b = estimate_tv(10, 1, 1, 20_000, 3).unwrap();
    assert_eq!(a.tv, b.tv);
    // Only 2^n choices of v are possible.
    assert!(a.distinct_seen <= 1 << 10);
    let c = estimate_tv(6, 0, 2, 20_000, 4).unwrap();
    assert_eq!(c.outside_sigma, 0);
}

#[test]
fn frames_beyond_budget_are_rejected() {
    assert!(enumerate_sigma(&RestrictionFrame::zero(1, 2)).is_err());
    assert!(estimate_tv(8, 2, 1, 10, 0).is_err());
}

#[test]
fn controls_are_exactly_zero() {
    let (_, s) = sample_ncube_seeded(10, 5, 1).unwrap();
    let st = s.table();
    let shifted = Translate { f: &st, a: 1 };
    let gens: Vec<&dyn Phase> = vec![&shifted, &st];
    assert_eq!(conditional_expectation_error(&st, &gens, 10).unwrap().l1, 0.0);
    assert_eq!(conditional_expectation_error(&FuncTable::zeros(10), &gens, 10).unwrap().l2, 0.0);
    let c = FuncTable::zeros(10).add_const(DyadicTorus::new(3, 5).unwrap());
    assert_eq!(conditional_expectation_error(&c, &[], 10).unwrap().l1, 0.0);
}

#[test]
fn no_generators_gives_distance_to_the_mean() {
    // e(x_1 / 2) has mean 0, so every point is at distance 1.
    let f = FuncTable::from_fn(4, |x| if x & 1 == 1 { DyadicTorus::HALF } else { DyadicTorus::ZERO });
    let e = conditional_expectation_error(&f, &[], 4).unwrap();
    assert!((e.l1 - 1.0).abs() < 1e-15 && (e.l2 - 1.0).abs() < 1e-15);
    assert_eq!(e.cells, 1);
}

#[test]
fn overfit_flag() {
    let x = FuncTable::from_fn(6, |x| DyadicTorus::new(x as i128, 6).unwrap());
    let f = sample_ncube_seeded(6, 5, 2).unwrap().1.table();
    let e = conditional_expectation_error(&f, &[&x], 6).unwrap();
    assert!(e.overfit && e.l1 == 0.0 && e.ratio == 1.0);
}

#[test]
fn probe_report() {
    let r = measurability_probe(10, 1, 5, 17).unwrap();
    for row in [&r.main, &r.contrast] {
        assert_eq!(row.control_target_in_generators.l1, 0.0);
        assert_eq!(row.control_constant.l1, 0.0);
        assert_eq!(row.main.overfit, row.main.cells as u64 >= row.main.points / 8);
        assert!((0.0..=1.0).contains(&row.correlation_s_p));
    }
    assert_eq!(r.contrast.r, 1);
    assert!(r.contrast.main.cells <= 4 && !r.contrast.main.overfit);
    assert!(serde_json::to_string(&r).unwrap().contains("correlation_s_p"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refinement_never_increases_l2(seed: u64, levels in proptest::collection::vec(1u8..4, 1..4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 8;
        let target = FuncTable::from_nums(n, 5, (0..1 << n).map(|_| rng.gen()).collect()).unwrap();
        let gens: Vec<FuncTable> = levels
            .iter()
            .map(|&l| FuncTable::from_nums(n, l, (0..1 << n).map(|_| rng.gen()).collect()).unwrap())
            .collect();
        let mut prev = f64::INFINITY;
        for k in 0..=gens.len() {
            let g: Vec<&dyn Phase> = gens[..k].iter().map(|t| t as &dyn Phase).collect();
            let e = conditional_expectation_error(&target, &g, n).unwrap();
            prop_assert!(e.l2 <= prev + 1e-12, "{} > {}", e.l2, prev);
            prev = e.l2;
        }
    }
}
