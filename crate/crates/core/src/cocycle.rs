//! Cocycles on Host-Kra cube spaces of filtered groups, evaluated on the
//! Host-Kra parameters of a `(k+1)`-cube.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cube::FilteredGroup;
use crate::dyadic::DyadicTorus;
use crate::error::{Error, Result};
use crate::table::FuncTable;

type Eval<'a> = dyn Fn(&[u64]) -> DyadicTorus + Send + Sync + 'a;

pub struct CocycleHandle<'a> {
    pub space: FilteredGroup,
    pub k: usize,
    /// Values lie in `(1/2^level)Z/Z`.
    pub level: u8,
    eval: Box<Eval<'a>>,
}

impl<'a> CocycleHandle<'a> {
    pub fn new(
        space: FilteredGroup,
        k: usize,
        level: u8,
        eval: impl Fn(&[u64]) -> DyadicTorus + Send + Sync + 'a,
    ) -> Self {
        CocycleHandle {
            space,
            k,
            level,
            eval: Box::new(eval),
        }
    }

    /// Number of cube coordinates, `k + 1`.
    pub fn dim(&self) -> usize {
        self.k + 1
    }

    pub fn eval_params(&self, h: &[u64]) -> DyadicTorus {
        debug_assert_eq!(h.len(), 1 << self.dim());
        (self.eval)(h)
    }

    pub fn eval_tuple(&self, t: &[u64]) -> DyadicTorus {
        self.eval_params(&self.space.params(t))
    }

    /// `rho_{h_1..h_{k+1}}(x)` on a degree-1 space.
    pub fn eval_at(&self, x: u64, hs: &[u64]) -> DyadicTorus {
        let mut p = vec![0u64; 1 << hs.len()];
        p[0] = x;
        for (i, &h) in hs.iter().enumerate() {
            p[1 << i] = h;
        }
        self.eval_params(&p)
    }

    pub fn random_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        random_cube_params(&self.space, self.dim(), rng)
    }

    /// Bits needed to enumerate every `(k+1)`-cube.
    pub fn cube_space_bits(&self) -> u32 {
        cube_bits(&self.space, self.dim())
    }
}

pub fn random_cube_params<R: Rng + ?Sized>(g: &FilteredGroup, m: usize, rng: &mut R) -> Vec<u64> {
    (0..1usize << m)
        .map(|a| g.random_in_level(a.count_ones() as usize, rng))
        .collect()
}

fn level_bits(g: &FilteredGroup, i: usize) -> Vec<(u64, u32)> {
    // (generator, width) pairs spanning G_i bit by bit.
    g.level_generators(i)
        .into_iter()
        .map(|gen| {
            let mut w = 0;
            let mut x = gen;
            while x != 0 {
                w += 1;
                x = g.add(x, x);
            }
            (gen, w)
        })
        .collect()
}

pub fn cube_bits(g: &FilteredGroup, m: usize) -> u32 {
    (0..1usize << m)
        .map(|a| {
            level_bits(g, a.count_ones() as usize)
                .iter()
                .map(|&(_, w)| w)
                .sum::<u32>()
        })
        .sum()
}

/// Decodes `code` into Host-Kra parameters of an m-cube; every code below
/// `2^cube_bits` gives a distinct cube.
pub fn decode_cube(g: &FilteredGroup, m: usize, mut code: u64) -> Vec<u64> {
    let mut h = vec![0u64; 1 << m];
    for (a, ha) in h.iter_mut().enumerate() {
        for (gen, w) in level_bits(g, a.count_ones() as usize) {
            let v = code & ((1u64 << w) - 1);
            code >>= w;
            *ha = g.add(*ha, g.scale(gen, v as i64));
        }
    }
    h
}

/// Relabels cube coordinates: coordinate `i` of the result is `perm[i]`.
pub fn permute_params(h: &[u64], perm: &[usize]) -> Vec<u64> {
    (0..h.len())
        .map(|a| {
            let src = (0..perm.len()).fold(0usize, |acc, i| acc | ((a >> i) & 1) << perm[i]);
            h[src]
        })
        .collect()
}

/// Given a (k+1)-cube `(x, y)` split along the last coordinate and free
/// parameters `q` for the upper half of `(y, z)`, returns `(y, z)` and `(x, z)`.
pub fn concatenate(g: &FilteredGroup, p1: &[u64], q: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let half = p1.len() / 2;
    let mut c2 = vec![0u64; p1.len()];
    let mut c3 = vec![0u64; p1.len()];
    for a in 0..half {
        c2[a] = g.add(p1[a], p1[a + half]);
        c2[a + half] = q[a];
        c3[a] = p1[a];
        c3[a + half] = g.add(p1[a + half], q[a]);
    }
    (c2, c3)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AxiomReport {
    pub symmetric: bool,
    pub concatenation: bool,
    pub exhaustive: bool,
    pub cubes_checked: u64,
    pub pairs_checked: u64,
    pub first_failure: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.symmetric && self.concatenation
    }
}

const EXHAUSTIVE_BITS: u32 = 24;

/// Symmetry under coordinate permutations and the concatenation identity
/// `rho(x,z) = rho(x,y) + rho(y,z)`. Exhaustive when the parameter space has
/// at most 2^24 points (symmetry is then checked on adjacent transpositions,
/// which generate all permutations); otherwise `samples` seeded draws, each
/// checked on the transpositions and one random permutation.
pub fn check_cocycle_axioms(rho: &CocycleHandle, samples: u64, seed: u64) -> AxiomReport {
    let g = &rho.space;
    let m = rho.dim();
    let upper_bits: u32 = (0..1usize << rho.k)
        .map(|a| {
            level_bits(g, a.count_ones() as usize + 1)
                .iter()
                .map(|&(_, w)| w)
                .sum::<u32>()
        })
        .sum();
    let cb = rho.cube_space_bits();
    let exhaustive = cb + upper_bits <= EXHAUSTIVE_BITS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let transpositions: Vec<Vec<usize>> = (0..m.saturating_sub(1))
        .map(|i| {
            let mut p: Vec<usize> = (0..m).collect();
            p.swap(i, i + 1);
            p
        })
        .collect();
    let mut report = AxiomReport {
        symmetric: true,
        concatenation: true,
        exhaustive,
        cubes_checked: 0,
        pairs_checked: 0,
        first_failure: None,
    };
    let check_sym = |h: &[u64], extra: Option<Vec<usize>>, report: &mut AxiomReport| {
        let v = rho.eval_params(h);
        for p in transpositions.iter().cloned().chain(extra) {
            let hp = permute_params(h, &p);
            if rho.eval_params(&hp) != v {
                report.symmetric = false;
                report.first_failure.get_or_insert_with(|| {
                    format!("symmetry fails: params {h:?} and {hp:?} differ by the permutation {p:?}")
                });
            }
        }
        report.cubes_checked += 1;
    };
    let upper_space = upper_half_space(g, rho.k);
    let check_pair = |p1: &[u64], q: &[u64], report: &mut AxiomReport| {
        let (c2, c3) = concatenate(g, p1, q);
        if rho.eval_params(&c3) != rho.eval_params(p1) + rho.eval_params(&c2) {
            report.concatenation = false;
            report.first_failure.get_or_insert_with(|| {
                format!("concatenation fails: rho({c3:?}) != rho({p1:?}) + rho({c2:?})")
            });
        }
        report.pairs_checked += 1;
    };
    if exhaustive {
        for code in 0..1u64 << cb {
            let h = decode_cube(g, m, code);
            check_sym(&h, None, &mut report);
            for qc in 0..1u64 << upper_bits {
                let q = upper_space(qc);
                check_pair(&h, &q, &mut report);
            }
        }
    } else {
        let mut perm: Vec<usize> = (0..m).collect();
        for _ in 0..samples {
            let h = rho.random_params(&mut rng);
            perm.shuffle(&mut rng);
            check_sym(&h, Some(perm.clone()), &mut report);
            let q: Vec<u64> = (0..1usize << rho.k)
                .map(|a| g.random_in_level(a.count_ones() as usize + 1, &mut rng))
                .collect();
            check_pair(&h, &q, &mut report);
        }
    }
    report
}

fn upper_half_space(g: &FilteredGroup, k: usize) -> impl Fn(u64) -> Vec<u64> + '_ {
    move |mut code| {
        (0..1usize << k)
            .map(|a| {
                let mut x = 0;
                for (gen, w) in level_bits(g, a.count_ones() as usize + 1) {
                    let v = code & ((1u64 << w) - 1);
                    code >>= w;
                    x = g.add(x, g.scale(gen, v as i64));
                }
                x
            })
            .collect()
    }
}

/// Concatenation identity over every cube pair whose combined parameter
/// list (the first cube's parameters followed by the free upper parameters
/// of the second) has at most `max_nonzero` nonzero entries. Each nonzero
/// entry ranges over the nonzero elements of its level.
pub fn concatenation_sweep(rho: &CocycleHandle, max_nonzero: usize) -> (u64, Option<String>) {
    let g = &rho.space;
    let m = rho.dim();
    let mut slots: Vec<Vec<u64>> = Vec::new();
    for a in 0..1usize << m {
        slots.push(level_elements(g, a.count_ones() as usize));
    }
    for a in 0..1usize << rho.k {
        slots.push(level_elements(g, a.count_ones() as usize + 1));
    }
    let slots: Vec<(usize, Vec<u64>)> = slots
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .collect();
    let mut count = 0u64;
    let mut failure = None;
    let mut vals = vec![0u64; (1 << m) + (1 << rho.k)];
    fn rec(
        slots: &[(usize, Vec<u64>)],
        start: usize,
        left: usize,
        vals: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[u64]),
    ) {
        visit(vals);
        if left == 0 {
            return;
        }
        for s in start..slots.len() {
            let (idx, ref els) = slots[s];
            for &e in els {
                vals[idx] = e;
                rec(slots, s + 1, left - 1, vals, visit);
            }
            vals[idx] = 0;
        }
    }
    let split = 1 << m;
    rec(&slots, 0, max_nonzero, &mut vals, &mut |v: &[u64]| {
        let (p1, q) = v.split_at(split);
        let (c2, c3) = concatenate(g, p1, q);
        count += 1;
        if failure.is_none() && rho.eval_params(&c3) != rho.eval_params(p1) + rho.eval_params(&c2) {
            failure = Some(format!(
                "concatenation fails: rho({c3:?}) != rho({p1:?}) + rho({c2:?})"
            ));
        }
    });
    (count, failure)
}

fn level_elements(g: &FilteredGroup, i: usize) -> Vec<u64> {
    (1..g.order()).filter(|&x| g.in_level(x, i)).collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub holds: bool,
    pub exhaustive: bool,
    pub checked: u64,
    pub witness: Option<(u64, Vec<u64>)>,
}

/// Checks `rho_{h1,h1,h2,h3..hk}(x) = rho_{h2,h2,h1,h3..hk}(x)` on a
/// degree-1 space `D^1(F_2^n)` with k >= 2.
pub fn check_2homog(rho: &CocycleHandle, samples: u64, seed: u64) -> Result<HomogeneityReport> {
    if rho.k < 2 {
        return Err(Error::Precondition("2-homogeneity needs k >= 2".into()));
    }
    if rho.space.degree() != 1 || rho.space.exps().iter().any(|&r| r != 1) {
        return Err(Error::Precondition("2-homogeneity is checked on D^1(F_2^n)".into()));
    }
    let n = rho.space.exps().len() as u32;
    let k = rho.k;
    let test = |x: u64, h: &[u64]| -> bool {
        let mut a = vec![h[0], h[0], h[1]];
        a.extend_from_slice(&h[2..]);
        let mut b = vec![h[1], h[1], h[0]];
        b.extend_from_slice(&h[2..]);
        rho.eval_at(x, &a) == rho.eval_at(x, &b)
    };
    let total_bits = n * (k as u32 + 1);
    let mut report = HomogeneityReport {
        holds: true,
        exhaustive: total_bits <= EXHAUSTIVE_BITS,
        checked: 0,
        witness: None,
    };
    let mask = (1u64 << n) - 1;
    let run = |code: u64, report: &mut HomogeneityReport| {
        let x = code & mask;
        let h: Vec<u64> = (0..k).map(|i| code >> (n as usize * (i + 1)) & mask).collect();
        report.checked += 1;
        if !test(x, &h) && report.witness.is_none() {
            report.holds = false;
            report.witness = Some((x, h));
        }
    };
    if report.exhaustive {
        for code in 0..1u64 << total_bits {
            run(code, &mut report);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let code = rng.gen::<u64>() & ((1u64 << total_bits.min(63)) - 1);
            run(code, &mut report);
        }
    }
    Ok(report)
}

/// `d^{k+1} F` on a filtered group, as a cocycle.
pub fn coboundary_of<'a>(space: FilteredGroup, k: usize, f: &'a FuncTable) -> CocycleHandle<'a> {
    let g = space.clone();
    CocycleHandle::new(space, k, f.level(), move |h| {
        let t = g.tuple(h);
        alternating_sum(&t, |p| f.get(p as u32))
    })
}

/// `sum_w (-1)^{m-|w|} F(t_w)`.
pub fn alternating_sum(t: &[u64], f: impl Fn(u64) -> DyadicTorus) -> DyadicTorus {
    let m = t.len().trailing_zeros();
    let mut acc = DyadicTorus::ZERO;
    for (w, &p) in t.iter().enumerate() {
        if (m - w.count_ones()) % 2 == 0 {
            acc += f(p);
        } else {
            acc -= f(p);
        }
    }
    acc
}

/// The trilinear 2-cocycle on `D^1(F_2^2)` given by
/// `(h1^(2) h2^(1) h3^(1) + h1^(1) h2^(2) h3^(1) + h1^(1) h2^(1) h3^(2)) / 2`.
/// It is a cocycle but not 2-homogeneous.
pub fn trilinear_cocycle() -> CocycleHandle<'static> {
    CocycleHandle::new(FilteredGroup::f2(2, 1), 2, 1, |h| {
        let (a, b, c) = (h[1], h[2], h[4]);
        let bit = |v: u64, i: u32| (v >> i) & 1;
        let s = bit(a, 1) & bit(b, 0) & bit(c, 0)
            ^ bit(a, 0) & bit(b, 1) & bit(c, 0)
            ^ bit(a, 0) & bit(b, 0) & bit(c, 1);
        DyadicTorus::from_raw(s, 1)
    })
}
