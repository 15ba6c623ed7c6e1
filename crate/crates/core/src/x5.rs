//! The nilspaces `X_{5,r} = X_2 x (1/2^r)Z/Z`.
//!
//! An n-cube is a pair `(Q, S)` with `Q: F_2^n -> X_2` a pair of classical
//! quadratics and `S: F_2^n -> (1/2^r)Z/Z` with `d^6 S = Q*rho`. Every such
//! `S` has the form `binom2(R) Q_2 / 2 + P` with `R = Q_1 mod 2` a cubic
//! Z/4 lift and `P` of degree 5.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::MAX_DIM;
use crate::cube::{corner_complete, FilteredGroup};
use crate::dyadic::{binom2, mask, DyadicTorus};
use crate::error::{Error, Result};
use crate::poly::{parse_header, random_poly, PolyRep};
use crate::rho::{klein, Rho, RhoInput};
use crate::table::{FuncTable, Phase};
use crate::z4poly::{build_r, Z4Poly};

/// Largest `n` for which a dense value cache is built.
pub const CACHE_DIM: usize = 20;
const EXHAUSTIVE_DIM: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct X5Point {
    /// Point of `X_2`: bit 0 is the first coordinate.
    pub q: u8,
    pub s: DyadicTorus,
}

/// `Q = (Q_1, Q_2)`, both classical quadratics on F_2^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadPair {
    pub q1: PolyRep,
    pub q2: PolyRep,
}

fn check_quadratic(p: &PolyRep) -> Result<()> {
    if p.level() > 1 || p.degree() > 2 {
        return Err(Error::Precondition(format!(
            "expected a classical quadratic, got degree {} at level {}",
            p.degree(),
            p.level()
        )));
    }
    Ok(())
}

impl QuadPair {
    pub fn new(q1: PolyRep, q2: PolyRep) -> Result<Self> {
        check_quadratic(&q1)?;
        check_quadratic(&q2)?;
        if q1.n() != q2.n() {
            return Err(Error::Dimension("Q_1 and Q_2 on different spaces".into()));
        }
        Ok(QuadPair { q1, q2 })
    }

    pub fn zero(n: usize) -> Self {
        QuadPair {
            q1: PolyRep::zero(n, 2, 1),
            q2: PolyRep::zero(n, 2, 1),
        }
    }

    /// From F_2-valued tables; fails unless both are quadratic.
    pub fn from_bits(n: usize, q: &[u8]) -> Result<Self> {
        let comp = |c: u8| -> Result<PolyRep> {
            let t = FuncTable::from_nums(n, 1, q.iter().map(|&v| (v >> c & 1) as u64).collect())?;
            PolyRep::from_table(&t, 2)
        };
        QuadPair::new(comp(0)?, comp(1)?)
    }

    pub fn n(&self) -> usize {
        self.q1.n()
    }

    pub fn eval(&self, x: u32) -> u8 {
        (self.q1.eval(x).num() | self.q2.eval(x).num() << 1) as u8
    }

    pub fn table(&self) -> Vec<u8> {
        let (a, b) = (self.q1.to_table(), self.q2.to_table());
        (0..1u32 << self.n())
            .map(|x| (a.get(x).num() | b.get(x).num() << 1) as u8)
            .collect()
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        QuadPair {
            q1: random_poly(n, 2, 1, rng),
            q2: random_poly(n, 2, 1, rng),
        }
    }
}

/// `S = binom2(R) Q_2 / 2 + P`, stored structurally.
#[derive(Clone, Debug)]
pub struct PseudoQuintic {
    pub r: u8,
    pub rr: Z4Poly,
    pub q2: PolyRep,
    pub p: PolyRep,
    cache: Option<FuncTable>,
}

impl PartialEq for PseudoQuintic {
    fn eq(&self, o: &Self) -> bool {
        self.r == o.r && self.rr == o.rr && self.q2 == o.q2 && self.p == o.p
    }
}

impl PseudoQuintic {
    pub fn new(r: u8, rr: Z4Poly, q2: PolyRep, p: PolyRep) -> Result<Self> {
        if !(1..=5).contains(&r) {
            return Err(Error::Precondition(format!("r = {r} outside 1..=5")));
        }
        check_quadratic(&q2)?;
        if p.degree() > 5 || p.level() > r {
            return Err(Error::Precondition(format!(
                "P must have degree <= 5 and level <= {r}"
            )));
        }
        if rr.n() != q2.n() || p.n() != q2.n() {
            return Err(Error::Dimension("blocks on different spaces".into()));
        }
        Ok(PseudoQuintic { r, rr, q2, p, cache: None })
    }

    pub fn n(&self) -> usize {
        self.q2.n()
    }

    /// `S_0 = binom2(R) Q_2 / 2` part at `x`.
    pub fn base_eval(&self, x: u32) -> DyadicTorus {
        let b = binom2(self.rr.eval(x)) as u64 & self.q2.eval(x).num();
        DyadicTorus::new(b as i128, 1).expect("level 1")
    }

    pub fn eval_structural(&self, x: u32) -> DyadicTorus {
        self.base_eval(x) + self.p.eval(x)
    }

    pub fn has_cache(&self) -> bool {
        self.cache.is_some()
    }

    /// Builds the dense value table when `n <= CACHE_DIM`.
    pub fn with_cache(mut self) -> Self {
        if self.n() <= CACHE_DIM && self.cache.is_none() {
            self.cache = Some(self.dense());
        }
        self
    }

    fn dense(&self) -> FuncTable {
        let n = self.n();
        assert!(n <= MAX_DIM);
        let rt = self.rr.to_table();
        let q2 = self.q2.to_table();
        let l = self.r.max(1);
        let p = self.p.to_table().nums_at(l);
        let half = 1u64 << (l - 1);
        let nums = (0..1usize << n)
            .map(|x| {
                let b = binom2(rt[x]) as u64 & q2.get(x as u32).num();
                (p[x] + b * half) & mask(l)
            })
            .collect();
        FuncTable::from_nums(n, l, nums).expect("valid table")
    }

    pub fn table(&self) -> FuncTable {
        self.cache.clone().unwrap_or_else(|| self.dense())
    }

    /// The pair `(Q_1, Q_2)` with `Q_1 = R mod 2`.
    pub fn quad_pair(&self) -> Result<QuadPair> {
        let n = self.n();
        if n > MAX_DIM {
            return Err(Error::Budget(format!("recovering Q_1 on 2^{n} points")));
        }
        let t = FuncTable::from_nums(n, 1, self.rr.to_table().iter().map(|a| (a.value() & 1) as u64).collect())?;
        QuadPair::new(PolyRep::from_table(&t, 2)?, self.q2.clone())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "PSEUDOQUINTIC n={} r={}", self.n(), self.r).unwrap();
        s.push_str(&self.rr.to_text());
        s.push_str(&self.q2.to_text());
        s.push_str(&self.p.to_text());
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut header = None;
        let mut blocks: Vec<(usize, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if header.is_none() {
                header = Some(t);
                continue;
            }
            if t.starts_with("POLY") {
                blocks.push((i, String::new()));
            }
            match blocks.last_mut() {
                Some((start, b)) => {
                    // Keep blank lines so block-relative numbering maps back.
                    while b.lines().count() < i - *start {
                        b.push('\n');
                    }
                    b.push_str(t);
                    b.push('\n');
                }
                None => return Err(Error::Parse(format!("line {}: expected a POLY block", i + 1))),
            }
        }
        let header = header.ok_or_else(|| Error::Parse("empty pseudo-quintic file".into()))?;
        let h = parse_header(header, "PSEUDOQUINTIC")?;
        let (n, r) = (h.get("n")?, h.get("r")?);
        if blocks.len() != 3 {
            return Err(Error::Parse(format!("expected 3 POLY blocks, found {}", blocks.len())));
        }
        let rr = Z4Poly::from_text_at(&blocks[0].1, blocks[0].0)?;
        let q2 = PolyRep::from_text_at(&blocks[1].1, blocks[1].0)?;
        let p = PolyRep::from_text_at(&blocks[2].1, blocks[2].0)?;
        if rr.n() != n {
            return Err(Error::Parse(format!("header says n={n}, blocks have n={}", rr.n())));
        }
        PseudoQuintic::new(r as u8, rr, q2, p)
    }
}

impl Phase for PseudoQuintic {
    fn dim(&self) -> usize {
        self.n()
    }
    fn eval(&self, x: u32) -> DyadicTorus {
        match &self.cache {
            Some(t) => t.get(x),
            None => self.eval_structural(x),
        }
    }
}

/// `S_0 = binom2(R) Q_2 / 2`, the explicit lift of `Q`, with `P = 0`.
pub fn lift(q: &QuadPair, r: u8) -> Result<PseudoQuintic> {
    let rr = build_r(&q.q1)?;
    PseudoQuintic::new(r, rr, q.q2.clone(), PolyRep::zero(q.n(), 5, r))
}

/// Uniform n-cube of `X_{5,r}`: independent uniform quadratics and a
/// uniform `P` in `Poly^5(F_2^n -> (1/2^r)Z/Z)`.
pub fn sample_ncube<R: Rng + ?Sized>(n: usize, r: u8, rng: &mut R) -> Result<(QuadPair, PseudoQuintic)> {
    let q = QuadPair::random(n, rng);
    let mut s = lift(&q, r)?;
    s.p = random_poly(n, 5, r, rng);
    Ok((q, s))
}

pub fn sample_ncube_seeded(n: usize, r: u8, seed: u64) -> Result<(QuadPair, PseudoQuintic)> {
    sample_ncube(n, r, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct X5Check {
    pub holds: bool,
    pub exhaustive: bool,
    pub checked: u64,
    /// `(x, h_1..h_6)` of the first failing tuple.
    pub first_failure: Option<Vec<u32>>,
}

/// `rho` on the 6-cube `x + w.h` of `X_2` traced out by `q`.
pub fn pulled_rho(rho: &Rho, q: impl Fn(u32) -> u8, x: u32, hs: &[u32; 6]) -> DyadicTorus {
    let t: Vec<u64> = (0..64u32).map(|w| q(point(x, hs, w)) as u64).collect();
    rho.eval(&RhoInput::from_params(&klein().params(&t)))
}

#[inline]
fn point(x: u32, hs: &[u32], w: u32) -> u32 {
    hs.iter()
        .enumerate()
        .fold(x, |acc, (i, &h)| if w >> i & 1 == 1 { acc ^ h } else { acc })
}

/// `d^6 S` at `(x, h_1..h_6)`.
pub fn d6(s: &(impl Phase + ?Sized), x: u32, hs: &[u32; 6]) -> DyadicTorus {
    (0..64u32)
        .map(|w| {
            let v = s.eval(point(x, hs, w));
            if (6 - w.count_ones()) % 2 == 0 { v } else { -v }
        })
        .sum()
}

/// Checks `d^6 S = Q*rho`: on every tuple for `n <= 2`, else on `samples`
/// seeded tuples. `Q` is quadratic by construction of [`QuadPair`].
pub fn x5_cube_check(q: &QuadPair, s: &(impl Phase + Sync + ?Sized), r: u8, samples: u64, seed: u64) -> Result<X5Check> {
    let n = q.n();
    if s.dim() != n {
        return Err(Error::Dimension(format!("Q on F_2^{n}, S on F_2^{}", s.dim())));
    }
    if !(1..=5).contains(&r) {
        return Err(Error::Precondition(format!("r = {r} outside 1..=5")));
    }
    let rho = Rho::standard();
    let qt: Option<Vec<u8>> = (n <= CACHE_DIM).then(|| q.table());
    let qv = |x: u32| match &qt {
        Some(t) => t[x as usize],
        None => q.eval(x),
    };
    let exhaustive = n <= EXHAUSTIVE_DIM;
    let nmask = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let tuples: Vec<[u32; 7]> = if exhaustive {
        (0u32..1 << (7 * n))
            .map(|c| std::array::from_fn(|i| c >> (n * i) & nmask))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| std::array::from_fn(|_| rng.gen::<u32>() & nmask))
            .collect()
    };
    let level_bad = tuples
        .par_iter()
        .find_map_any(|t| (0..64).map(|w| point(t[0], &t[1..], w)).find(|&p| s.eval(p).level() > r));
    if let Some(p) = level_bad {
        return Err(Error::Precondition(format!("S({p}) = {} is not at level <= {r}", s.eval(p))));
    }
    let bad = tuples.par_iter().find_first(|t| {
        let hs: [u32; 6] = t[1..].try_into().unwrap();
        d6(s, t[0], &hs) != pulled_rho(&rho, qv, t[0], &hs)
    });
    Ok(X5Check {
        holds: bad.is_none(),
        exhaustive,
        checked: tuples.len() as u64,
        first_failure: bad.map(|t| t.to_vec()),
    })
}

/// Completes vertex `1^n` of an n-cube of `X_{5,r}` whose faces through
/// `0^n` are cubes. `partial[2^n - 1]` is ignored.
pub fn x5_corner_complete(n: usize, r: u8, partial: &[X5Point]) -> Result<Vec<X5Point>> {
    if partial.len() != 1 << n || n == 0 {
        return Err(Error::Dimension(format!("corner of an {n}-cube needs 2^{n} vertices, n >= 1")));
    }
    if n > MAX_DIM {
        return Err(Error::Budget(format!("corner of dimension {n}")));
    }
    let qs: Vec<u64> = partial.iter().map(|p| p.q as u64).collect();
    let qfull = corner_complete(&klein(), &qs)?;
    let qbits: Vec<u8> = qfull.iter().map(|&v| v as u8).collect();
    let q = QuadPair::from_bits(n, &qbits)?;
    let s0 = lift(&q, r)?;
    let top = (1usize << n) - 1;
    let mut diff = Vec::with_capacity(1 << n);
    for (w, p) in partial.iter().enumerate() {
        if w == top {
            diff.push(0);
            continue;
        }
        if p.s.level() > r {
            return Err(Error::Precondition(format!("vertex {w} has value {} above level {r}", p.s)));
        }
        diff.push((p.s - s0.eval_structural(w as u32)).numerator_at(r));
    }
    let dfull = corner_complete(&FilteredGroup::torus(r, 5), &diff)?;
    Ok((0..1usize << n)
        .map(|w| {
            if w == top {
                X5Point {
                    q: qbits[w],
                    s: s0.eval_structural(w as u32) + DyadicTorus::new(dfull[w] as i128, r).unwrap(),
                }
            } else {
                partial[w]
            }
        })
        .collect())
}

/// Splits a vertex list into `Q` and a value table for `S`.
pub fn split_vertices(n: usize, v: &[X5Point]) -> Result<(QuadPair, FuncTable)> {
    if v.len() != 1 << n {
        return Err(Error::Dimension(format!("expected 2^{n} vertices")));
    }
    let q = QuadPair::from_bits(n, &v.iter().map(|p| p.q).collect::<Vec<_>>())?;
    let s = FuncTable::from_values(n, &v.iter().map(|p| p.s).collect::<Vec<_>>());
    Ok((q, s))
}

pub fn vertices(q: &QuadPair, s: &(impl Phase + ?Sized)) -> Vec<X5Point> {
    (0..1u32 << q.n())
        .map(|x| X5Point { q: q.eval(x), s: s.eval(x) })
        .collect()
}

/// `d^4 binom2(R)` at `(x, h_1..h_4)`, as an element of F_2.
pub fn d4_binom2(rr: &Z4Poly, x: u32, hs: &[u32; 4]) -> u8 {
    (0..16u32).fold(0, |acc, w| acc ^ binom2(rr.eval(point(x, hs, w))))
}

/// `Sym^2(d^2 Q_1)(h_1..h_4)`: sum over the three pairings of products of
/// the bilinear form `d^2 Q_1`.
pub fn sym2_d2q(q1: &PolyRep, hs: &[u32; 4]) -> u8 {
    let b = |a: u32, c: u32| -> u8 {
        let v = q1.eval(a ^ c) - q1.eval(a) - q1.eval(c) + q1.eval(0);
        v.num() as u8
    };
    let [h1, h2, h3, h4] = *hs;
    (b(h1, h2) & b(h3, h4)) ^ (b(h1, h3) & b(h2, h4)) ^ (b(h1, h4) & b(h2, h3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(n: usize, terms: &[u32]) -> PolyRep {
        PolyRep::new(n, 2, 1, DyadicTorus::ZERO, terms.iter().map(|&s| (s, DyadicTorus::HALF))).unwrap()
    }

    #[test]
    fn parse_errors_carry_file_line_numbers() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        let s = lift(&QuadPair::random(3, &mut r), 5).unwrap();
        let mut lines: Vec<String> = s.to_text().lines().map(String::from).collect();
        let last = lines.len();
        lines.insert(2, String::new());
        lines.push("TERM 9 1".into());
        let err = PseudoQuintic::from_text(&lines.join("\n")).unwrap_err().to_string();
        assert!(err.contains(&format!("line {}:", last + 2)), "{err}");
        let err = PolyRep::from_text("POLY n=2 d=2 level=1\nCONST 0/2^0\nTRM 1 1").unwrap_err().to_string();
        assert!(err.contains("line 3:"), "{err}");
    }

    #[test]
    fn documented_lifts() {
        let q = QuadPair::new(quad(2, &[0b11]), quad(2, &[0b01])).unwrap();
        let s = lift(&q, 5).unwrap();
        assert!(s.table().is_zero());
        let c = x5_cube_check(&q, &s, 5, 0, 0).unwrap();
        assert!(c.holds && c.exhaustive && c.checked == 1 << 14);

        let q = QuadPair::new(quad(2, &[0b01, 0b10]), quad(2, &[0b01])).unwrap();
        let s = lift(&q, 5).unwrap();
        let t = s.table();
        assert_eq!(t.get(3), DyadicTorus::HALF);
        assert!((0..3).all(|x| t.get(x).is_zero()));
        assert!(x5_cube_check(&q, &s, 5, 0, 0).unwrap().holds);

        let z = QuadPair::zero(3);
        assert!(lift(&z, 5).unwrap().table().is_zero());
    }

    #[test]
    fn degree_six_perturbation_fails() {
        let q = QuadPair::new(quad(2, &[0b11]), quad(2, &[0b10])).unwrap();
        let s = lift(&q, 5).unwrap().table();
        let bump = PolyRep::new(2, 6, 5, DyadicTorus::ZERO, [(0b11, DyadicTorus::new(1, 5).unwrap())])
            .unwrap()
            .to_table();
        let c = x5_cube_check(&q, &s.add(&bump), 5, 0, 0).unwrap();
        assert!(!c.holds);
        assert!(x5_cube_check(&q, &s, 5, 0, 0).unwrap().holds);
    }

    #[test]
    fn pq_text_roundtrip() {
        let (_, s) = sample_ncube_seeded(4, 5, 9).unwrap();
        let text = s.to_text();
        let back = PseudoQuintic::from_text(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn cache_matches_structural_evaluation() {
        let (_, s) = sample_ncube_seeded(6, 5, 2).unwrap();
        let c = s.clone().with_cache();
        assert!(c.has_cache());
        assert!((0..64).all(|x| c.eval(x) == s.eval_structural(x)));
    }
}
