//! Non-classical polynomials F_2^n -> Z[1/2]/Z in the monomial form
//! `P(x) = alpha + sum_S v_S |x_S|`, where `v_S = c_S / 2^(d+1-|S|)`.
//!
//! The map `P -> (v_S)` is the Mobius transform over subsets, so degree
//! is read off exactly from a value table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::{indices, mobius, subsets, zeta, MAX_DIM};
use crate::dyadic::{mask, DyadicTorus, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::table::{FuncTable, Phase};

/// Largest level a coefficient on a monomial of size `k` may have in degree `d`.
#[inline]
pub fn coeff_level_bound(d: usize, k: usize) -> Option<u8> {
    if k > d {
        None
    } else {
        Some((d + 1 - k).min(MAX_LEVEL as usize) as u8)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyRep {
    n: usize,
    d: usize,
    level: u8,
    alpha: DyadicTorus,
    /// Nonzero monomial coefficients `v_S`, keyed by the mask of `S` (never 0).
    coeffs: BTreeMap<u32, DyadicTorus>,
}

impl PolyRep {
    pub fn new(
        n: usize,
        d: usize,
        level: u8,
        alpha: DyadicTorus,
        coeffs: impl IntoIterator<Item = (u32, DyadicTorus)>,
    ) -> Result<Self> {
        if n > 32 {
            return Err(Error::Dimension(format!("n = {n} exceeds 32")));
        }
        if level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level as u32));
        }
        let mut p = PolyRep {
            n,
            d,
            level,
            alpha,
            coeffs: BTreeMap::new(),
        };
        for (s, v) in coeffs {
            if s == 0 {
                p.alpha += v;
            } else {
                *p.coeffs.entry(s).or_default() += v;
            }
        }
        p.coeffs.retain(|_, v| !v.is_zero());
        p.validate()?;
        Ok(p)
    }

    pub fn zero(n: usize, d: usize, level: u8) -> Self {
        PolyRep {
            n,
            d,
            level,
            alpha: DyadicTorus::ZERO,
            coeffs: BTreeMap::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |detail: String| {
            Err(Error::NotPolynomial {
                degree: self.d as i32,
                detail,
            })
        };
        if self.alpha.level() > self.level {
            return bad(format!("constant {} exceeds level {}", self.alpha, self.level));
        }
        for (&s, v) in &self.coeffs {
            if self.n < 32 && s >> self.n != 0 {
                return Err(Error::Dimension(format!("monomial {:?} outside n = {}", indices(s), self.n)));
            }
            let k = s.count_ones() as usize;
            match coeff_level_bound(self.d, k) {
                None => return bad(format!("monomial {:?} has size above the degree", indices(s))),
                Some(b) if v.level() > b.min(self.level) => {
                    return bad(format!(
                        "coefficient {} on {:?} needs level {} > {}",
                        v,
                        indices(s),
                        v.level(),
                        b.min(self.level)
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.d
    }
    pub fn level(&self) -> u8 {
        self.level
    }
    pub fn alpha(&self) -> DyadicTorus {
        self.alpha
    }
    pub fn coeffs(&self) -> &BTreeMap<u32, DyadicTorus> {
        &self.coeffs
    }

    /// `v_S` for any mask, including the empty one.
    pub fn coeff(&self, s: u32) -> DyadicTorus {
        if s == 0 {
            self.alpha
        } else {
            self.coeffs.get(&s).copied().unwrap_or_default()
        }
    }

    /// Integer `c_S` with `v_S = c_S / 2^(d+1-|S|)`.
    pub fn integer_coeff(&self, s: u32) -> u64 {
        let v = self.coeff(s);
        let k = s.count_ones() as usize;
        let l = (self.d + 1 - k) as u8;
        v.numerator_at(l)
    }

    /// Same polynomial with a larger degree bound or level.
    pub fn widen(&self, d: usize, level: u8) -> Result<Self> {
        Self::new(
            self.n,
            d,
            level,
            self.alpha,
            self.coeffs.iter().map(|(&s, &v)| (s, v)),
        )
    }

    pub fn eval(&self, x: u32) -> DyadicTorus {
        let mut acc = self.alpha;
        for (&s, &v) in &self.coeffs {
            if s & !x == 0 {
                acc += v;
            }
        }
        acc
    }

    pub fn to_table(&self) -> FuncTable {
        assert!(self.n <= MAX_DIM, "dimension {} too large for a dense table", self.n);
        let l = self
            .coeffs
            .values()
            .map(|v| v.level())
            .chain(std::iter::once(self.alpha.level()))
            .max()
            .unwrap_or(0);
        let mut a = vec![0u64; 1 << self.n];
        a[0] = self.alpha.numerator_at(l);
        for (&s, v) in &self.coeffs {
            a[s as usize] = v.numerator_at(l);
        }
        zeta(&mut a, self.n, mask(l));
        FuncTable::from_nums(self.n, l, a).expect("valid table")
    }

    /// Recovers the monomial form; fails if the table has degree above `d`.
    pub fn from_table(t: &FuncTable, d: usize) -> Result<PolyRep> {
        let n = t.n();
        let l = t.level();
        let mut a = t.nums().to_vec();
        mobius(&mut a, n, mask(l));
        let mut coeffs = BTreeMap::new();
        for (s, &c) in a.iter().enumerate().skip(1) {
            if c != 0 {
                coeffs.insert(s as u32, DyadicTorus::from_raw(c, l));
            }
        }
        let p = PolyRep {
            n,
            d,
            level: l,
            alpha: DyadicTorus::from_raw(a[0], l),
            coeffs,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn add(&self, o: &PolyRep) -> Result<PolyRep> {
        if self.n != o.n {
            return Err(Error::Dimension("polynomials on different spaces".into()));
        }
        Self::new(
            self.n,
            self.d.max(o.d),
            self.level.max(o.level),
            self.alpha + o.alpha,
            self.coeffs.iter().chain(o.coeffs.iter()).map(|(&s, &v)| (s, v)),
        )
    }

    pub fn neg(&self) -> PolyRep {
        PolyRep {
            alpha: -self.alpha,
            coeffs: self.coeffs.iter().map(|(&s, &v)| (s, -v)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, o: &PolyRep) -> Result<PolyRep> {
        self.add(&o.neg())
    }

    /// `k * P`, same degree bound and level.
    pub fn scale(&self, k: i64) -> PolyRep {
        let mut coeffs: BTreeMap<u32, DyadicTorus> = self
            .coeffs
            .iter()
            .map(|(&s, &v)| (s, v.mul_int(k)))
            .collect();
        coeffs.retain(|_, v| !v.is_zero());
        PolyRep {
            alpha: self.alpha.mul_int(k),
            coeffs,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.coeffs.is_empty()
    }

    /// Text form: a `POLY` header, a `CONST` line and one `TERM` per monomial,
    /// with 1-based indices in lexicographic order of index lists.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "POLY n={} d={} level={}", self.n, self.d, self.level).unwrap();
        writeln!(s, "CONST {}/2^{}", self.alpha.num(), self.alpha.level()).unwrap();
        let mut terms: Vec<(Vec<usize>, u32)> =
            self.coeffs.keys().map(|&m| (indices(m), m)).collect();
        terms.sort();
        for (idx, m) in terms {
            let list: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            writeln!(s, "TERM {} {}", list.join(","), self.integer_coeff(m)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PolyRep> {
        Self::from_text_at(text, 0)
    }

    /// As `from_text`, with diagnostics numbered from `offset + 1`.
    pub(crate) fn from_text_at(text: &str, offset: usize) -> Result<PolyRep> {
        let mut lines = numbered_lines(text, offset);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty polynomial file".into()))?;
        let h = parse_header(header, "POLY").map_err(at_line(hl))?;
        let (n, d, level) = (|| Ok::<_, Error>((h.get("n")?, h.get("d")?, h.get("level")?)))().map_err(at_line(hl))?;
        if h.flag("coeff") == Some("z4") {
            return Err(Error::Parse(format!("line {hl}: Z/4 block where a torus polynomial was expected")));
        }
        if level > MAX_LEVEL as usize {
            return Err(Error::LevelOverflow(level as u32));
        }
        let mut alpha = None;
        let mut coeffs = Vec::new();
        for (ln, line) in lines {
            let at = at_line(ln);
            if let Some(rest) = line.strip_prefix("CONST ") {
                alpha = Some(rest.trim().parse::<DyadicTorus>().map_err(&at)?);
            } else if let Some(rest) = line.strip_prefix("TERM ") {
                let (m, c) = parse_term(rest, n).map_err(&at)?;
                let k = m.count_ones() as usize;
                if k > d {
                    return Err(at(Error::Parse(format!("term of size {k} above degree {d}"))));
                }
                let l = (d + 1 - k) as u32;
                if l > MAX_LEVEL as u32 {
                    return Err(Error::LevelOverflow(l));
                }
                if c >= 1u128 << l {
                    return Err(at(Error::Parse(format!("coefficient {c} not below 2^{l}"))));
                }
                coeffs.push((m, DyadicTorus::new(c as i128, l as u8)?));
            } else {
                return Err(at(Error::Parse(format!("unexpected line {line:?}"))));
            }
        }
        let alpha = alpha.ok_or_else(|| Error::Parse("missing CONST line".into()))?;
        PolyRep::new(n, d, level as u8, alpha, coeffs)
    }
}

impl Phase for PolyRep {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: u32) -> DyadicTorus {
        PolyRep::eval(self, x)
    }
}

/// Non-blank, non-comment lines with 1-based numbers shifted by `offset`.
pub(crate) fn numbered_lines(text: &str, offset: usize) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(move |(i, l)| (i + 1 + offset, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse(m) => Error::Parse(format!("line {line}: {m}")),
        e => e,
    }
}

pub(crate) struct Header<'a> {
    fields: Vec<(&'a str, &'a str)>,
}

impl<'a> Header<'a> {
    pub(crate) fn get(&self, key: &str) -> Result<usize> {
        let v = self
            .flag(key)
            .ok_or_else(|| Error::Parse(format!("missing header field {key}")))?;
        v.parse()
            .map_err(|_| Error::Parse(format!("bad value for {key}: {v:?}")))
    }
    pub(crate) fn flag(&self, key: &str) -> Option<&'a str> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

pub(crate) fn parse_header<'a>(line: &'a str, tag: &str) -> Result<Header<'a>> {
    let mut it = line.split_whitespace();
    if it.next() != Some(tag) {
        return Err(Error::Parse(format!("expected {tag} header, got {line:?}")));
    }
    let mut fields = Vec::new();
    for f in it {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {f:?}")))?;
        fields.push((k, v));
    }
    Ok(Header { fields })
}

/// Parses `i1,i2,...,ik c` into a mask and the integer coefficient.
pub(crate) fn parse_term(rest: &str, n: usize) -> Result<(u32, u128)> {
    let mut parts = rest.split_whitespace();
    let (idx, c) = match (parts.next(), parts.next(), parts.next()) {
        (Some(i), Some(c), None) => (i, c),
        _ => return Err(Error::Parse(format!("bad TERM line {rest:?}"))),
    };
    let mut m = 0u32;
    let mut prev = 0usize;
    for i in idx.split(',') {
        let i: usize = i
            .parse()
            .map_err(|_| Error::Parse(format!("bad index {i:?}")))?;
        if i == 0 || i > n || i <= prev {
            return Err(Error::Parse(format!("index list {idx:?} must be increasing within 1..={n}")));
        }
        prev = i;
        m |= 1 << (i - 1);
    }
    let c: u128 = c
        .parse()
        .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?;
    Ok((m, c))
}

/// Degree test on a value table: true iff every iterated difference of
/// order `k+1` vanishes.
///
/// Along basis directions `∂_{e_i}^m = (-2)^(m-1) ∂_{e_i}`, so the
/// direction-multiset conditions reduce to `2^(k+1-|S|) v_S = 0` on the
/// Mobius coefficients.
pub fn degree_test(t: &FuncTable, k: i32) -> bool {
    if k < 0 {
        return t.is_zero();
    }
    PolyRep::from_table(t, k as usize).is_ok()
}

/// Canonical representative of `t + Poly^k`: the constant term is dropped
/// and each Mobius coefficient `v_S` with `1 <= |S| <= k` is reduced modulo
/// `(1/2^(k+1-|S|))Z/Z`. Two tables differ
/// by a polynomial of degree `k` iff their reductions are equal, and the
/// reduction has the least level in the coset.
pub fn reduce_mod_poly(t: &FuncTable, k: i32) -> FuncTable {
    if k < 0 {
        return t.clone();
    }
    let n = t.n();
    let l = t.level();
    let mut a = t.nums().to_vec();
    mobius(&mut a, n, mask(l));
    for (s, v) in a.iter_mut().enumerate() {
        let w = s.count_ones() as i32;
        if w == 0 {
            *v = 0;
        } else if w <= k {
            let b = (k + 1 - w) as u8;
            *v = if l > b { *v & mask(l - b) } else { 0 };
        }
    }
    zeta(&mut a, n, mask(l));
    FuncTable::from_nums(n, l, a).expect("valid table")
}

/// Brute-force form of [`degree_test`]: applies every multiset of `k+1`
/// basis directions and checks the result vanishes everywhere.
pub fn degree_test_by_differences(t: &FuncTable, k: i32) -> bool {
    fn rec(t: &FuncTable, start: usize, left: usize) -> bool {
        if left == 0 {
            return t.is_zero();
        }
        if t.is_zero() {
            return true;
        }
        (start..t.n()).all(|i| rec(&t.derivative(1 << i), i, left - 1))
    }
    if k < 0 {
        return t.is_zero();
    }
    rec(t, 0, k as usize + 1)
}

/// Derivative `x -> P(x+h) - P(x)` computed on the monomial form; the degree
/// bound is kept.
pub fn derivative(p: &PolyRep, h: u32) -> PolyRep {
    let mut w: BTreeMap<u32, DyadicTorus> = BTreeMap::new();
    let all = std::iter::once((0u32, p.alpha)).chain(p.coeffs.iter().map(|(&s, &v)| (s, v)));
    for (t, v) in all {
        let fixed = t & !h;
        for u in subsets(t & h) {
            let s = fixed | u;
            let term = if u.count_ones() % 2 == 1 { -v } else { v };
            *w.entry(s).or_default() += term;
        }
        *w.entry(t).or_default() -= v;
    }
    let alpha = w.remove(&0).unwrap_or_default();
    w.retain(|_, v| !v.is_zero());
    PolyRep {
        n: p.n,
        d: p.d,
        level: p.level,
        alpha,
        coeffs: w,
    }
}

/// Returns Q of degree d+1 at level+1 with 2Q = P, by halving each `v_S`.
pub fn exact_root(p: &PolyRep) -> Result<PolyRep> {
    if p.level >= MAX_LEVEL {
        return Err(Error::LevelOverflow(p.level as u32 + 1));
    }
    let mut coeffs = BTreeMap::new();
    for (&s, v) in &p.coeffs {
        coeffs.insert(s, v.halve()?);
    }
    let q = PolyRep {
        n: p.n,
        d: p.d + 1,
        level: p.level + 1,
        alpha: p.alpha.halve()?,
        coeffs,
    };
    debug_assert!(q.validate().is_ok());
    Ok(q)
}

fn anf(p: &PolyRep) -> Result<Vec<u32>> {
    if p.level > 1 {
        return Err(Error::Precondition("product needs classical (1/2)Z/Z-valued inputs".into()));
    }
    let mut s: Vec<u32> = p.coeffs.keys().copied().collect();
    if !p.alpha.is_zero() {
        s.insert(0, 0);
    }
    Ok(s)
}

/// Pointwise product of two classical polynomials, as F_2-valued functions.
pub fn poly_product(p1: &PolyRep, p2: &PolyRep) -> Result<PolyRep> {
    if p1.n != p2.n {
        return Err(Error::Dimension("polynomials on different spaces".into()));
    }
    let (a, b) = (anf(p1)?, anf(p2)?);
    let mut acc: BTreeMap<u32, bool> = BTreeMap::new();
    for &s in &a {
        for &t in &b {
            let e = acc.entry(s | t).or_insert(false);
            *e = !*e;
        }
    }
    let d = p1.d + p2.d;
    let q = PolyRep::new(
        p1.n,
        d,
        1,
        DyadicTorus::ZERO,
        acc.into_iter()
            .filter(|&(_, b)| b)
            .map(|(s, _)| (s, DyadicTorus::HALF)),
    )?;
    if q.n <= MAX_DIM && !degree_test(&q.to_table(), d as i32) {
        return Err(Error::Certification("product failed its degree test".into()));
    }
    Ok(q)
}

/// Solves `Q + T^e Q = P` for an `e`-invariant P of degree d, returning Q of
/// degree d+1: `Q = P(0)/2 + [x_j = 1] (P - P(0))` for any j with `e_j = 1`.
pub fn invert_one_plus_shift(p: &PolyRep, e: u32) -> Result<PolyRep> {
    if e == 0 || (p.n < 32 && e >> p.n != 0) {
        return Err(Error::Precondition("e must be a nonzero vector of F_2^n".into()));
    }
    if !derivative(p, e).is_zero() {
        return Err(Error::Precondition("polynomial is not invariant under the shift".into()));
    }
    if p.level >= MAX_LEVEL {
        return Err(Error::LevelOverflow(p.level as u32 + 1));
    }
    let j = 1u32 << e.trailing_zeros();
    PolyRep::new(
        p.n,
        p.d + 1,
        p.level + 1,
        p.alpha.halve()?,
        p.coeffs.iter().map(|(&s, &v)| (s | j, v)),
    )
}

/// Uniform element of Poly^d(F_2^n -> (1/2^level)Z/Z).
pub fn random_poly<R: Rng + ?Sized>(n: usize, d: usize, level: u8, rng: &mut R) -> PolyRep {
    assert!(n <= 32 && level <= MAX_LEVEL);
    let mut draw = |l: u8| -> DyadicTorus {
        let v = if l == 0 { 0 } else { rng.gen::<u64>() & mask(l) };
        DyadicTorus::from_raw(v, l)
    };
    let alpha = draw(level);
    let mut coeffs = BTreeMap::new();
    for s in monomials(n, d.min(n)) {
        let l = coeff_level_bound(d, s.count_ones() as usize).unwrap().min(level);
        let v = draw(l);
        if !v.is_zero() {
            coeffs.insert(s, v);
        }
    }
    PolyRep {
        n,
        d,
        level,
        alpha,
        coeffs,
    }
}

pub fn random_poly_seeded(n: usize, d: usize, level: u8, seed: u64) -> PolyRep {
    random_poly(n, d, level, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Nonempty monomial masks on n variables of size <= k, by size then value.
pub fn monomials(n: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(n: usize, start: usize, left: usize, cur: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            rec(n, i + 1, left - 1, cur | 1 << i, out);
        }
    }
    for size in 1..=k.min(n) {
        rec(n, 0, size, 0, &mut out);
    }
    out
}

/// log2 of |Poly^d(F_2^n -> (1/2^level)Z/Z)|.
pub fn poly_group_log2(n: usize, d: usize, level: u8) -> u64 {
    let mut total = level as u64;
    let mut binom = 1u64;
    for k in 1..=d.min(n) {
        binom = binom * (n - k + 1) as u64 / k as u64;
        total += binom * ((d + 1 - k).min(level as usize)) as u64;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DyadicTorus {
        s.parse().unwrap()
    }

    #[test]
    fn quarter_x1_is_degree_two_not_one() {
        let t = FuncTable::from_fn(1, |x| if x == 1 { d("1/4") } else { d("0") });
        assert!(!degree_test(&t, 1));
        assert!(degree_test(&t, 2));
        assert!(!degree_test_by_differences(&t, 1));
        assert!(degree_test_by_differences(&t, 2));
    }

    #[test]
    fn group_size_small_case() {
        // alpha: 2^5, two linear terms at 2^5 each, one quadratic at 2^4.
        assert_eq!(poly_group_log2(2, 5, 5), 19);
    }

    #[test]
    fn group_size_matches_enumeration() {
        // Count all functions F_2^2 -> (1/8)Z/Z of degree <= 2 by brute force.
        let mut count = 0u64;
        for code in 0..(8u64.pow(4)) {
            let t = FuncTable::from_fn(2, |x| {
                DyadicTorus::new(((code >> (3 * x)) & 7) as i128, 3).unwrap()
            });
            if degree_test(&t, 2) {
                count += 1;
            }
        }
        assert_eq!(count, 1 << poly_group_log2(2, 2, 3));
    }

    #[test]
    fn exact_root_of_half_x1() {
        let p = PolyRep::new(1, 1, 1, d("0"), [(1, d("1/2"))]).unwrap();
        let q = exact_root(&p).unwrap();
        assert_eq!(q.coeff(1), d("1/4"));
        assert_eq!(q.degree(), 2);
        assert_eq!(q.scale(2), p.widen(2, 2).unwrap());
    }

    #[test]
    fn text_roundtrip_and_order() {
        let p = PolyRep::new(
            3,
            2,
            3,
            d("3/8"),
            [(0b011, d("1/2")), (0b001, d("3/4")), (0b100, d("1/4"))],
        )
        .unwrap();
        let s = p.to_text();
        assert_eq!(
            s,
            "POLY n=3 d=2 level=3\nCONST 3/2^3\nTERM 1 3\nTERM 1,2 1\nTERM 3 1\n"
        );
        assert_eq!(PolyRep::from_text(&s).unwrap(), p);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(PolyRep::from_text("POLY n=2 d=1 level=2\nCONST 0/2^0\nTERM 1,2 1\n").is_err());
        assert!(PolyRep::from_text("POLY n=2 d=1 level=2\nCONST 0/2^0\nTERM 3 1\n").is_err());
        assert!(PolyRep::from_text("POLY n=2 d=1 level=2\nCONST 0/2^0\nTERM 1 4\n").is_err());
        assert!(PolyRep::from_text("POLY n=2 d=1 level=1\nCONST 0/2^0\nTERM 1 3\n").is_err());
        assert!(PolyRep::from_text("POLY n=2 d=1\nCONST 0/2^0\n").is_err());
    }

    #[test]
    fn invert_example() {
        // P = |x_1|/2 on F_2^2 is e_2-invariant; Q = |x_1||x_2|/2.
        let p = PolyRep::new(2, 1, 1, d("0"), [(0b01, d("1/2"))]).unwrap();
        let q = invert_one_plus_shift(&p, 0b10).unwrap();
        let qt = q.to_table();
        assert_eq!(qt.add(&qt.shift(0b10)), p.to_table());
        assert!(invert_one_plus_shift(&p, 0b01).is_err());
    }

    #[test]
    fn product_of_linears() {
        let x1 = PolyRep::new(2, 1, 1, d("0"), [(0b01, d("1/2"))]).unwrap();
        let x1p1 = PolyRep::new(2, 1, 1, d("1/2"), [(0b01, d("1/2"))]).unwrap();
        let x2 = PolyRep::new(2, 1, 1, d("0"), [(0b10, d("1/2"))]).unwrap();
        assert!(poly_product(&x1, &x1p1).unwrap().is_zero());
        assert_eq!(poly_product(&x1, &x2).unwrap().coeff(0b11), d("1/2"));
    }
}
