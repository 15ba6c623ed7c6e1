//! The 5-cocycle on 6-cubes of the Klein nilspace `X_2 = D^2(F_2^2)`:
//!
//! `rho = (1/2) sum h^(1)_ab h^(1)_cd h^(2)_ef` over the 45 ways of splitting
//! {1..6} into an unordered pair of pairs `{ab, cd}` and a third pair `ef`,
//! together with the edge function `psi` with `rho = d^5 psi`, and the
//! descent certificate showing `rho` is not a coboundary.
//!
//! Points of `X_2` are 2-bit integers: bit 0 is the first coordinate.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coboundary::{
    decide_coboundary, equation_row, pair_with_coboundary, verify_certificate, CubeSource, Decision,
    KernelCertificate, Target,
};
use crate::cocycle::{check_cocycle_axioms, concatenation_sweep, AxiomReport, CocycleHandle};
use crate::cube::{morphism_check, FilteredGroup};
use crate::dyadic::DyadicTorus;
use crate::error::Result;
use crate::table::FuncTable;

/// The 15 pairs `i < j` of {1..6}, in lexicographic order.
pub const PAIRS: [(u8, u8); 15] = [
    (1, 2), (1, 3), (1, 4), (1, 5), (1, 6),
    (2, 3), (2, 4), (2, 5), (2, 6),
    (3, 4), (3, 5), (3, 6),
    (4, 5), (4, 6),
    (5, 6),
];

/// `[p, q, r]`: pairs `p < q` carry `h^(1)`, pair `r` carries `h^(2)`
/// (indices into [`PAIRS`]), sorted.
pub const PARTITIONS: [[u8; 3]; 45] = [
    [0, 9, 14], [0, 10, 13], [0, 11, 12], [0, 12, 11], [0, 13, 10],
    [0, 14, 9], [1, 6, 14], [1, 7, 13], [1, 8, 12], [1, 12, 8],
    [1, 13, 7], [1, 14, 6], [2, 5, 14], [2, 7, 11], [2, 8, 10],
    [2, 10, 8], [2, 11, 7], [2, 14, 5], [3, 5, 13], [3, 6, 11],
    [3, 8, 9], [3, 9, 8], [3, 11, 6], [3, 13, 5], [4, 5, 12],
    [4, 6, 10], [4, 7, 9], [4, 9, 7], [4, 10, 6], [4, 12, 5],
    [5, 12, 4], [5, 13, 3], [5, 14, 2], [6, 10, 4], [6, 11, 3],
    [6, 14, 1], [7, 9, 4], [7, 11, 2], [7, 13, 1], [8, 9, 3],
    [8, 10, 2], [8, 12, 1], [9, 14, 0], [10, 13, 0], [11, 12, 0],
];

/// Index of `h_{ij}` among Host-Kra parameters of a 6-cube.
pub fn pair_param(p: usize) -> usize {
    let (i, j) = PAIRS[p];
    1 << (i - 1) | 1 << (j - 1)
}

pub fn pair_index(i: u8, j: u8) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    PAIRS.iter().position(|&q| q == (i, j)).expect("a pair of distinct indices in 1..=6")
}

/// The pair parameters `h_ij`: bit `p` of `h1` (resp. `h2`) is the first
/// (resp. second) coordinate of `h_{PAIRS[p]}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct RhoInput {
    pub h1: u16,
    pub h2: u16,
}

impl RhoInput {
    pub fn from_params(h: &[u64]) -> Self {
        let mut r = RhoInput::default();
        for p in 0..15 {
            let v = h[pair_param(p)];
            r.h1 |= ((v & 1) as u16) << p;
            r.h2 |= ((v >> 1 & 1) as u16) << p;
        }
        r
    }

    pub fn from_pairs(pairs: &[(u8, u8, u64)]) -> Self {
        let mut r = RhoInput::default();
        for &(i, j, v) in pairs {
            let p = pair_index(i, j);
            r.h1 ^= ((v & 1) as u16) << p;
            r.h2 ^= ((v >> 1 & 1) as u16) << p;
        }
        r
    }

    pub fn pair(&self, p: usize) -> u64 {
        (self.h1 >> p & 1) as u64 | ((self.h2 >> p & 1) as u64) << 1
    }

    /// Host-Kra parameters with only the pair entries nonzero.
    pub fn to_params(&self) -> Vec<u64> {
        let mut h = vec![0u64; 64];
        for p in 0..15 {
            h[pair_param(p)] = self.pair(p);
        }
        h
    }
}

/// The cocycle, evaluated from a partition table (normally [`PARTITIONS`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rho {
    table: Vec<[u8; 3]>,
}

impl Default for Rho {
    fn default() -> Self {
        Rho::standard()
    }
}

impl Rho {
    pub fn standard() -> Self {
        Rho {
            table: PARTITIONS.to_vec(),
        }
    }

    /// The table with entry `n` removed; used to check that verification
    /// notices a wrong table.
    pub fn without_partition(n: usize) -> Self {
        let mut table = PARTITIONS.to_vec();
        table.remove(n % 45);
        Rho { table }
    }

    pub fn table(&self) -> &[[u8; 3]] {
        &self.table
    }

    pub fn bit(&self, r: &RhoInput) -> u64 {
        self.table.iter().fold(0, |acc, &[p, q, s]| {
            acc ^ ((r.h1 >> p) & (r.h1 >> q) & (r.h2 >> s) & 1) as u64
        })
    }

    pub fn eval(&self, r: &RhoInput) -> DyadicTorus {
        DyadicTorus::from_raw(self.bit(r), 1)
    }

    pub fn eval_params(&self, h: &[u64]) -> DyadicTorus {
        self.eval(&RhoInput::from_params(h))
    }

    pub fn handle(&self) -> CocycleHandle<'_> {
        CocycleHandle::new(klein(), 5, 1, move |h| self.eval_params(h))
    }
}

/// `X_2 = D^2(F_2^2)`.
pub fn klein() -> FilteredGroup {
    FilteredGroup::f2(2, 2)
}

/// Numerator over 4 of `psi(x, x+h) = [x1]^2 [h2]^2 / 4 + x1 h1 x2 / 2`.
#[inline]
pub fn psi_num(x: u64, h: u64) -> u64 {
    let (x1, x2) = (x & 1, x >> 1 & 1);
    let (h1, h2) = (h & 1, h >> 1 & 1);
    (x1 * h2 + 2 * x1 * h1 * x2) % 4
}

/// `psi` on the edge `(x, y)` of `X_2`.
pub fn psi_eval(x: u64, y: u64) -> DyadicTorus {
    DyadicTorus::from_raw(psi_num(x, x ^ y), 2)
}

/// `psi` as a table on edges, index `x | h << 2`.
pub fn psi_table() -> FuncTable {
    FuncTable::from_fn(4, |e| DyadicTorus::from_raw(psi_num((e & 3) as u64, (e >> 2) as u64), 2))
}

/// `d^m psi` on the (m+1)-cube with Host-Kra parameters `h`; the last
/// coordinate is the edge direction.
pub fn d_psi(h: &[u64], f: impl Fn(u64, u64) -> DyadicTorus) -> DyadicTorus {
    let g = klein();
    let t = g.tuple(h);
    let m = t.len().trailing_zeros() - 1;
    let top = 1usize << m;
    (0..top)
        .map(|w| {
            let v = f(t[w], t[w] ^ t[w | top]);
            if (m - w.count_ones()) % 2 == 0 { v } else { -v }
        })
        .sum()
}

pub fn d5_psi(h: &[u64]) -> DyadicTorus {
    d_psi(h, |x, e| DyadicTorus::from_raw(psi_num(x, e), 2))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub checked: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<RhoInput>,
}

/// Pairs inside {1..5}, the "outer" parameters of the sweep.
fn outer_pairs() -> Vec<usize> {
    (0..15).filter(|&p| PAIRS[p].1 < 6).collect()
}

/// Bit-sliced check of `rho = d^5 psi` on cubes with `x = h_i = 0`, with
/// outer codes in `range` (20 bits: components of the ten pairs inside
/// {1..5}) and all 2^10 values of the pairs `(i, 6)` as lanes.
pub fn sweep_range(rho: &Rho, range: std::ops::Range<u32>) -> SweepReport {
    let outer = outer_pairs();
    // Lane masks: lane L of word w is inner code 64 w + L; inner bit 2(i-1)+c
    // is component c of h_{i6}.
    let lane = |w: usize, b: usize| -> u64 {
        (0..64u64).fold(0, |acc, l| acc | ((((w as u64) * 64 + l) >> b) & 1) << l)
    };
    let masks: Vec<[u64; 10]> = (0..16)
        .map(|w| std::array::from_fn(|b| lane(w, b)))
        .collect();
    // H(w) = sum_{i in w} h_{i6}, per word.
    let hmask: Vec<[(u64, u64); 32]> = masks
        .iter()
        .map(|m| {
            std::array::from_fn(|om| {
                (0..5).filter(|i| om >> i & 1 == 1).fold((0, 0), |(a, b), i| {
                    (a ^ m[2 * i], b ^ m[2 * i + 1])
                })
            })
        })
        .collect();
    let pair_of_6: [Option<usize>; 15] = std::array::from_fn(|p| {
        let (i, j) = PAIRS[p];
        (j == 6).then_some(i as usize - 1)
    });
    range
        .into_par_iter()
        .fold(SweepReport::default, |mut rep, code| {
            let mut hv = [0u64; 15];
            for (k, &p) in outer.iter().enumerate() {
                hv[p] = (code >> (2 * k) & 3) as u64;
            }
            let mut x = [0u64; 32];
            for om in 1..32usize {
                let top = 31 - (om as u32).leading_zeros() as usize;
                let rest = om & !(1 << top);
                let mut v = x[rest];
                for i in 0..5 {
                    if rest >> i & 1 == 1 {
                        v ^= hv[pair_index(i as u8 + 1, top as u8 + 1)];
                    }
                }
                x[om] = v;
            }
            for (w, hm) in hmask.iter().enumerate() {
                let (mut c0, mut c1) = (0u64, 0u64);
                for om in 0..32usize {
                    if x[om] & 1 == 0 {
                        continue;
                    }
                    let (h1, h2) = hm[om];
                    let v0 = h2;
                    let mut v1 = if x[om] & 2 != 0 { h1 } else { 0 };
                    if (5 - (om as u32).count_ones()) % 2 == 1 {
                        v1 ^= v0;
                    }
                    c1 ^= v1 ^ (c0 & v0);
                    c0 ^= v0;
                }
                let op = |p: u8, comp: usize| -> u64 {
                    match pair_of_6[p as usize] {
                        Some(i) => masks[w][2 * i + comp],
                        None => 0u64.wrapping_sub(hv[p as usize] >> comp & 1),
                    }
                };
                let r = rho
                    .table
                    .iter()
                    .fold(0u64, |acc, &[p, q, s]| acc ^ (op(p, 0) & op(q, 0) & op(s, 1)));
                let bad = c0 | (c1 ^ r);
                rep.checked += 64;
                if bad != 0 {
                    rep.mismatches += bad.count_ones() as u64;
                    if rep.first_mismatch.is_none() {
                        let l = bad.trailing_zeros() as u64;
                        let inner = w as u64 * 64 + l;
                        let mut pv = hv;
                        for i in 0..5 {
                            pv[pair_index(i as u8 + 1, 6)] = inner >> (2 * i) & 3;
                        }
                        let mut input = RhoInput::default();
                        for (p, &v) in pv.iter().enumerate() {
                            input.h1 |= ((v & 1) as u16) << p;
                            input.h2 |= ((v >> 1) as u16) << p;
                        }
                        rep.first_mismatch = Some(input);
                    }
                }
            }
            rep
        })
        .reduce(SweepReport::default, |a, b| SweepReport {
            checked: a.checked + b.checked,
            mismatches: a.mismatches + b.mismatches,
            first_mismatch: a.first_mismatch.or(b.first_mismatch),
        })
}

/// `rho = d^5 psi` for every value of the 15 pair parameters (2^30 cubes).
pub fn full_sweep(rho: &Rho) -> SweepReport {
    sweep_range(rho, 0..1 << 20)
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongReport {
    pub sweep: Option<SweepReport>,
    pub random_checked: u64,
    pub random_mismatches: u64,
    pub four_cubes_checked: u64,
    pub four_cube_failures: u64,
    pub two_psi_cubic_by_morphism: bool,
    pub two_psi_edge_identity: bool,
    pub zero_cube: bool,
}

impl StrongReport {
    pub fn passed(&self) -> bool {
        self.sweep.as_ref().map_or(true, |s| s.mismatches == 0)
            && self.random_mismatches == 0
            && self.four_cube_failures == 0
            && self.two_psi_cubic_by_morphism
            && self.two_psi_edge_identity
            && self.zero_cube
    }
}

fn random_klein_params<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<u64> {
    (0..1usize << m)
        .map(|a| if a.count_ones() <= 2 { rng.gen_range(0..4) } else { 0 })
        .collect()
}

/// `rho = d^5 psi` (sweep plus random full parameters) and `2 psi` cubic on
/// `C^1(X_2)`.
pub fn verify_strong_homogeneity(rho: &Rho, samples: u64, seed: u64, sweep: bool) -> Result<StrongReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_mismatches = 0;
    for _ in 0..samples {
        let h = random_klein_params(6, &mut rng);
        if d5_psi(&h) != rho.eval_params(&h) {
            random_mismatches += 1;
        }
    }
    let two_psi = |x: u64, e: u64| DyadicTorus::from_raw(psi_num(x, e), 2).mul_int(2);
    let mut four_cube_failures = 0;
    for _ in 0..samples {
        let h = random_klein_params(5, &mut rng);
        if !d_psi(&h, two_psi).is_zero() {
            four_cube_failures += 1;
        }
    }
    let edge_identity = (0..4u64).all(|x| {
        (0..4u64).all(|h| two_psi(x, h) == DyadicTorus::from_raw((x & 1) * (h >> 1 & 1), 1))
    });
    // 2 psi as a map C^1(X_2) -> D^3((1/2)Z/Z), in Host-Kra coordinates.
    let c1 = klein().host_kra(1);
    let g = klein();
    let morph = morphism_check(&c1, &FilteredGroup::torus(1, 3), &|p| {
        let h = g.unpack_params(1, p);
        two_psi(h[0], h[1]).numerator_at(1)
    })?;
    let zero = vec![0u64; 64];
    Ok(StrongReport {
        sweep: sweep.then(|| full_sweep(rho)),
        random_checked: samples,
        random_mismatches,
        four_cubes_checked: samples,
        four_cube_failures,
        two_psi_cubic_by_morphism: morph,
        two_psi_edge_identity: edge_identity,
        zero_cube: d5_psi(&zero).is_zero() && rho.eval_params(&zero).is_zero(),
    })
}

/// Symmetry under all 720 permutations of {1..6}, on the partition table:
/// each permutation must map the set of partitions onto itself.
pub fn symmetry_check(rho: &Rho) -> (bool, u32) {
    let mut table: Vec<[u8; 3]> = rho.table.clone();
    table.sort_unstable();
    let mut perm: Vec<u8> = (1..=6).collect();
    let mut count = 0;
    let mut ok = true;
    permutations(&mut perm, 0, &mut |s: &[u8]| {
        count += 1;
        let map = |p: u8| -> u8 {
            let (i, j) = PAIRS[p as usize];
            pair_index(s[i as usize - 1], s[j as usize - 1]) as u8
        };
        let mut image: Vec<[u8; 3]> = table
            .iter()
            .map(|&[p, q, r]| {
                let (a, b) = (map(p), map(q));
                [a.min(b), a.max(b), map(r)]
            })
            .collect();
        image.sort_unstable();
        ok &= image == table;
    });
    (ok, count)
}

fn permutations(v: &mut Vec<u8>, k: usize, f: &mut impl FnMut(&[u8])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Linearity in the block `h_{1i}` with the other pairs fixed, exhaustively
/// over the block for `samples` random (and the zero) settings of the rest.
pub fn linearity_check(rho: &Rho, samples: u64, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block: Vec<usize> = (0..15).filter(|&p| PAIRS[p].0 == 1).collect();
    let rest_mask: u16 = !block.iter().fold(0u16, |a, &p| a | 1 << p) & 0x7fff;
    (0..=samples).all(|s| {
        let (r1, r2) = if s == 0 {
            (0, 0)
        } else {
            (rng.gen::<u16>() & rest_mask, rng.gen::<u16>() & rest_mask)
        };
        let at = |code: u32| -> u64 {
            let mut inp = RhoInput { h1: r1, h2: r2 };
            for (k, &p) in block.iter().enumerate() {
                inp.h1 |= ((code >> (2 * k) & 1) as u16) << p;
                inp.h2 |= ((code >> (2 * k + 1) & 1) as u16) << p;
            }
            rho.bit(&inp)
        };
        let basis: Vec<u64> = (0..10).map(|b| at(1 << b)).collect();
        at(0) == 0
            && (0..1u32 << 10).all(|c| {
                at(c) == (0..10).filter(|b| c >> b & 1 == 1).fold(0, |a, b| a ^ basis[b])
            })
    })
}

/// Cubes of the descent: only `h12, h34, h56` nonzero.
pub fn descent_cube(k1: u64, k2: u64, k3: u64) -> Vec<u64> {
    RhoInput::from_pairs(&[(1, 2, k1), (3, 4, k2), (5, 6, k3)]).to_params()
}

#[derive(Clone, Debug, Serialize)]
pub struct NonCoboundary {
    pub certificate: KernelCertificate,
    /// Descended form: `(k1, k2, k3, coefficient)`.
    pub descended: Vec<(u64, u64, u64, i64)>,
    /// Equation rows over the four points of `X_2` for each certificate cube.
    pub rows: Vec<Vec<i64>>,
    pub verified: bool,
    pub annihilates_coboundaries: u64,
    pub annihilation_failures: u64,
    pub torus_decision: Decision,
    pub torus_certificate_verified: bool,
    pub level_decisions: Vec<(u8, Decision)>,
    pub distinct_rows: usize,
    pub equations: u64,
}

impl NonCoboundary {
    pub fn passed(&self) -> bool {
        self.verified
            && self.certificate.pairing == DyadicTorus::HALF
            && self.annihilation_failures == 0
            && self.torus_decision == Decision::No
            && self.torus_certificate_verified
            && self.level_decisions.iter().all(|&(_, d)| d == Decision::No)
    }
}

/// All parameter vectors of a 6-cube of `X_2` with at most `max_nonzero`
/// nonzero entries among `x, h_i, h_ij`.
pub fn structured_cubes(max_nonzero: usize) -> Vec<Vec<u64>> {
    let slots: Vec<usize> = (0..64usize).filter(|a| a.count_ones() <= 2).collect();
    let mut out = Vec::new();
    fn rec(slots: &[usize], start: usize, left: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for k in start..slots.len() {
            for v in 1..4 {
                cur[slots[k]] = v;
                rec(slots, k + 1, left - 1, cur, out);
            }
            cur[slots[k]] = 0;
        }
    }
    rec(&slots, 0, max_nonzero, &mut vec![0u64; 64], &mut out);
    out
}

/// The descent certificate `rho(e1,e1,e2) - rho(e2,e2,e1)` and the
/// independent solver cross-checks on structured and sampled equations.
pub fn non_coboundary_certificate(rho: &Rho, samples: u64, seed: u64, levels: &[u8]) -> Result<NonCoboundary> {
    let (e1, e2) = (1u64, 2u64);
    let descended = vec![(e1, e1, e2, 1i64), (e2, e2, e1, -1i64)];
    let terms: Vec<(Vec<u64>, i64)> = descended
        .iter()
        .map(|&(a, b, c, k)| (descent_cube(a, b, c), k))
        .collect();
    let pairing = terms
        .iter()
        .map(|(h, k)| rho.eval_params(h).mul_int(*k))
        .sum::<DyadicTorus>();
    let certificate = KernelCertificate { terms, pairing };
    let handle = rho.handle();
    let g = klein();
    let rows = certificate.terms.iter().map(|(h, _)| equation_row(&g, h)).collect();
    let verified = verify_certificate(&handle, &certificate);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut annihilation_failures = 0;
    let trials = 100;
    for _ in 0..trials {
        let f = FuncTable::from_nums(2, 5, (0..4).map(|_| rng.gen_range(0..32)).collect())?;
        if !pair_with_coboundary(&g, &certificate, &f).is_zero() {
            annihilation_failures += 1;
        }
    }
    let given = structured_cubes(3);
    let source = || CubeSource::Mixed {
        given: given.clone(),
        count: samples,
        seed: seed ^ 0xc0b0,
    };
    let torus = decide_coboundary(&handle, Target::Torus, source())?;
    let torus_certificate_verified = torus
        .certificate
        .as_ref()
        .is_some_and(|c| verify_certificate(&handle, c));
    let mut level_decisions = Vec::new();
    for &r in levels {
        let v = decide_coboundary(&handle, Target::Level(r), source())?;
        level_decisions.push((r, v.decision));
    }
    Ok(NonCoboundary {
        certificate,
        descended,
        rows,
        verified,
        annihilates_coboundaries: trials,
        annihilation_failures,
        torus_decision: torus.decision,
        torus_certificate_verified,
        level_decisions,
        distinct_rows: torus.distinct_rows,
        equations: torus.equations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleReport {
    pub symmetric_720: bool,
    pub permutations: u32,
    pub axioms: AxiomReport,
    pub sweep_pairs: u64,
    pub sweep_failure: Option<String>,
    pub linear_in_first_block: bool,
    pub depends_only_on_pairs: bool,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.symmetric_720
            && self.axioms.passed()
            && self.sweep_failure.is_none()
            && self.linear_in_first_block
            && self.depends_only_on_pairs
    }
}

/// Symmetry, concatenation (random pairs plus the sweep of pairs with at
/// most three nonzero parameters) and the structural properties.
pub fn verify_cocycle(rho: &Rho, samples: u64, seed: u64) -> CocycleReport {
    let (symmetric_720, permutations) = symmetry_check(rho);
    let handle = rho.handle();
    let axioms = check_cocycle_axioms(&handle, samples, seed);
    let (sweep_pairs, sweep_failure) = concatenation_sweep(&handle, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
    let depends_only_on_pairs = (0..samples).all(|_| {
        let h = random_klein_params(6, &mut rng);
        rho.eval_params(&h) == rho.eval(&RhoInput::from_params(&h))
            && rho.eval_params(&h) == rho.eval_params(&RhoInput::from_params(&h).to_params())
    });
    CocycleReport {
        symmetric_720,
        permutations,
        axioms,
        sweep_pairs,
        sweep_failure,
        linear_in_first_block: linearity_check(rho, 64, seed),
        depends_only_on_pairs,
    }
}
