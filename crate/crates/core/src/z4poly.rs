//! Z/4-valued functions `R(x) = sum_S a_S |x_S| mod 4` on F_2^n.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bits::{indices, zeta, MAX_DIM};
use crate::dyadic::{DyadicTorus, Z4};
use crate::error::{Error, Result};
use crate::poly::{at_line, exact_root, numbered_lines, parse_header, parse_term, PolyRep};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Z4Poly {
    n: usize,
    /// Nonzero coefficients by monomial mask; the empty mask is the constant.
    coeffs: BTreeMap<u32, Z4>,
}

impl Z4Poly {
    pub fn new(n: usize, coeffs: impl IntoIterator<Item = (u32, Z4)>) -> Result<Self> {
        let mut map: BTreeMap<u32, Z4> = BTreeMap::new();
        for (s, a) in coeffs {
            if n < 32 && s >> n != 0 {
                return Err(Error::Dimension(format!("monomial {:?} outside n = {n}", indices(s))));
            }
            let e = map.entry(s).or_default();
            *e = *e + a;
        }
        map.retain(|_, a| a.value() != 0);
        Ok(Z4Poly { n, coeffs: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Z4> {
        &self.coeffs
    }

    pub fn eval(&self, x: u32) -> Z4 {
        self.coeffs
            .iter()
            .filter(|(&s, _)| s & !x == 0)
            .fold(Z4::default(), |acc, (_, &a)| acc + a)
    }

    pub fn to_table(&self) -> Vec<Z4> {
        assert!(self.n <= MAX_DIM);
        let mut a = vec![0u64; 1 << self.n];
        for (&s, v) in &self.coeffs {
            a[s as usize] = v.value() as u64;
        }
        zeta(&mut a, self.n, 3);
        a.into_iter().map(|v| Z4::new(v as i64)).collect()
    }

    /// `R / 4` as a torus-valued polynomial of degree `d`.
    pub fn quarter(&self, d: usize) -> Result<PolyRep> {
        PolyRep::new(
            self.n,
            d,
            2,
            DyadicTorus::ZERO,
            self.coeffs.iter().map(|(&s, a)| (s, a.quarter())),
        )
    }

    /// Block used inside pseudo-quintic files: coefficients are written as
    /// residues mod 4 and the header carries `coeff=z4`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "POLY n={} d=3 level=2 coeff=z4", self.n).unwrap();
        let c0 = self.coeffs.get(&0).map(|a| a.value()).unwrap_or(0);
        writeln!(s, "CONST {c0}/2^2").unwrap();
        let mut terms: Vec<(Vec<usize>, u8)> = self
            .coeffs
            .iter()
            .filter(|(&m, _)| m != 0)
            .map(|(&m, a)| (indices(m), a.value()))
            .collect();
        terms.sort();
        for (idx, a) in terms {
            let list: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            writeln!(s, "TERM {} {}", list.join(","), a).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_text_at(text, 0)
    }

    pub(crate) fn from_text_at(text: &str, offset: usize) -> Result<Self> {
        let mut lines = numbered_lines(text, offset);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty Z/4 block".into()))?;
        let h = parse_header(header, "POLY").map_err(at_line(hl))?;
        if h.flag("coeff") != Some("z4") {
            return Err(Error::Parse(format!("line {hl}: Z/4 block must carry coeff=z4")));
        }
        let n = h.get("n").map_err(at_line(hl))?;
        let mut coeffs = Vec::new();
        for (ln, line) in lines {
            Self::parse_line(line, n, &mut coeffs).map_err(at_line(ln))?;
        }
        Z4Poly::new(n, coeffs)
    }

    fn parse_line(line: &str, n: usize, coeffs: &mut Vec<(u32, Z4)>) -> Result<()> {
        {
            if let Some(rest) = line.strip_prefix("CONST ") {
                let (a, l) = rest
                    .trim()
                    .split_once("/2^")
                    .ok_or_else(|| Error::Parse(format!("bad CONST line {line:?}")))?;
                if l != "2" {
                    return Err(Error::Parse("Z/4 constant must be written over 2^2".into()));
                }
                let a: u8 = a
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad CONST line {line:?}")))?;
                if a > 3 {
                    return Err(Error::Parse("Z/4 constant out of range".into()));
                }
                coeffs.push((0, Z4::new(a as i64)));
            } else if let Some(rest) = line.strip_prefix("TERM ") {
                let (m, c) = parse_term(rest, n)?;
                if c > 3 {
                    return Err(Error::Parse(format!("Z/4 coefficient {c} out of range")));
                }
                coeffs.push((m, Z4::new(c as i64)));
            } else {
                return Err(Error::Parse(format!("unexpected line {line:?}")));
            }
        }
        Ok(())
    }
}

/// Checks `∂_{h1}...∂_{h_{k+1}} R = 0` for every multiset of basis directions
/// of size `k+1`, which for D^1(F_2^n) covers all directions.
pub fn z4_degree_by_differences(table: &[Z4], n: usize, k: usize) -> bool {
    fn diff(t: &[Z4], i: usize) -> Vec<Z4> {
        (0..t.len()).map(|x| t[x ^ (1 << i)] - t[x]).collect()
    }
    fn rec(t: &[Z4], n: usize, start: usize, left: usize) -> bool {
        if t.iter().all(|v| v.value() == 0) {
            return true;
        }
        if left == 1 {
            return (start..n).all(|i| (0..t.len()).all(|x| t[x ^ (1 << i)] == t[x]));
        }
        (start..n).all(|i| rec(&diff(t, i), n, i, left - 1))
    }
    assert_eq!(table.len(), 1 << n);
    rec(table, n, 0, k + 1)
}

/// Lifts a classical polynomial `q` (values in (1/2)Z/Z) to `R` with
/// `R = 2q mod 2` and `d^4 R = 0`, checking both properties directly.
///
/// The coefficientwise lift to {0,1} is tried first; if it fails its
/// certification the lift is rebuilt as 4 times an exact root of `q`.
pub fn build_r(q: &PolyRep) -> Result<Z4Poly> {
    if q.level() > 1 || q.degree() > 2 {
        return Err(Error::Precondition("input must be a classical quadratic".into()));
    }
    let n = q.n();
    let target: Vec<u8> = (0..1u32 << n).map(|x| q.eval(x).num() as u8).collect();
    let certify = |r: &Z4Poly| -> bool {
        let t = r.to_table();
        t.iter().zip(&target).all(|(a, &b)| a.value() & 1 == b) && z4_degree_by_differences(&t, n, 3)
    };
    let direct = Z4Poly::new(
        n,
        std::iter::once((0u32, q.alpha()))
            .chain(q.coeffs().iter().map(|(&s, &v)| (s, v)))
            .filter(|(_, v)| !v.is_zero())
            .map(|(s, _)| (s, Z4::new(1))),
    )?;
    if certify(&direct) {
        return Ok(direct);
    }
    let root = exact_root(q)?;
    let via_root = Z4Poly::new(
        n,
        std::iter::once((0u32, root.alpha()))
            .chain(root.coeffs().iter().map(|(&s, &v)| (s, v)))
            .map(|(s, v)| (s, Z4::new(v.numerator_at(2) as i64))),
    )?;
    if certify(&via_root) {
        return Ok(via_root);
    }
    Err(Error::Certification("no degree-3 lift of the quadratic was certified".into()))
}
