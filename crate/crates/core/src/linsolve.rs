//! Two independent solvers for integer systems `M F = b`.
//!
//! [`TorusLattice`] solves over the torus: rows are fed one at a time into
//! an integer echelon basis by unimodular gcd steps, so every row that
//! reduces to zero yields an element of the left kernel of M, and those
//! elements form a basis of it. The system is solvable iff each such
//! relation pairs with `b` to an integer.
//!
//! [`solve_mod_2r`] solves over `Z/2^r` by diagonal (Smith-style)
//! elimination, picking pivots of least 2-adic valuation.

use std::collections::BTreeMap;

use crate::dyadic::{DyadicTorus, MAX_LEVEL};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Row {
    a: Vec<i128>,
    b: DyadicTorus,
    combo: BTreeMap<usize, i128>,
}

impl Row {
    fn axpy(&mut self, q: i128, o: &Row) -> Result<()> {
        let ovf = || Error::Budget("integer overflow during elimination".into());
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x = x.checked_sub(q.checked_mul(*y).ok_or_else(ovf)?).ok_or_else(ovf)?;
        }
        let qb = i64::try_from(q.rem_euclid(1i128 << 62)).unwrap();
        self.b -= o.b.mul_int(qb);
        for (&k, &v) in &o.combo {
            let e = self.combo.entry(k).or_insert(0);
            *e = e.checked_sub(q.checked_mul(v).ok_or_else(ovf)?).ok_or_else(ovf)?;
        }
        self.combo.retain(|_, v| *v != 0);
        Ok(())
    }

    fn negate(&mut self) {
        for x in self.a.iter_mut() {
            *x = -*x;
        }
        self.b = -self.b;
        for v in self.combo.values_mut() {
            *v = -*v;
        }
    }
}

/// A left-kernel vector `v` (sparse, by row index) with `v . b` not an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub coeffs: Vec<(usize, i128)>,
    pub pairing: DyadicTorus,
}

pub struct TorusLattice {
    cols: usize,
    basis: Vec<Option<Row>>,
    rows_seen: usize,
    relations: usize,
    failure: Option<Relation>,
}

impl TorusLattice {
    pub fn new(cols: usize) -> Self {
        TorusLattice {
            cols,
            basis: vec![None; cols],
            rows_seen: 0,
            relations: 0,
            failure: None,
        }
    }

    pub fn failure(&self) -> Option<&Relation> {
        self.failure.as_ref()
    }

    pub fn relations(&self) -> usize {
        self.relations
    }

    pub fn rank(&self) -> usize {
        self.basis.iter().filter(|r| r.is_some()).count()
    }

    /// Adds row `id` with coefficients `a` and right-hand side `b`.
    pub fn push(&mut self, id: usize, a: &[i64], b: DyadicTorus) -> Result<()> {
        assert_eq!(a.len(), self.cols);
        self.rows_seen += 1;
        let mut row = Row {
            a: a.iter().map(|&x| x as i128).collect(),
            b,
            combo: BTreeMap::from([(id, 1)]),
        };
        for c in 0..self.cols {
            if row.a[c] == 0 {
                continue;
            }
            match self.basis[c].take() {
                None => {
                    if row.a[c] < 0 {
                        row.negate();
                    }
                    self.basis[c] = Some(row);
                    return Ok(());
                }
                Some(mut piv) => {
                    while row.a[c] != 0 {
                        let q = piv.a[c].div_euclid(row.a[c]);
                        piv.axpy(q, &row)?;
                        std::mem::swap(&mut piv, &mut row);
                    }
                    if piv.a[c] < 0 {
                        piv.negate();
                    }
                    self.basis[c] = Some(piv);
                }
            }
        }
        self.relations += 1;
        if !row.b.is_zero() && self.failure.is_none() {
            self.failure = Some(Relation {
                coeffs: row.combo.into_iter().collect(),
                pairing: row.b,
            });
        }
        Ok(())
    }

    /// A torus solution of the echelon rows (free columns set to 0). Only
    /// meaningful when no failing relation was found.
    pub fn solve(&self) -> Result<Vec<DyadicTorus>> {
        let mut f = vec![DyadicTorus::ZERO; self.cols];
        for c in (0..self.cols).rev() {
            let Some(row) = &self.basis[c] else { continue };
            let mut rhs = row.b;
            for j in c + 1..self.cols {
                if row.a[j] != 0 {
                    let k = i64::try_from(row.a[j].rem_euclid(1i128 << 62)).unwrap();
                    rhs -= f[j].mul_int(k);
                }
            }
            f[c] = divide(rhs, row.a[c])?;
        }
        Ok(f)
    }
}

/// Some `y` in the torus with `p y = x`, for `p > 0`.
pub fn divide(x: DyadicTorus, p: i128) -> Result<DyadicTorus> {
    assert!(p > 0);
    let s = p.trailing_zeros() as u8;
    let u = (p >> s) as u128;
    let l = x.level();
    let mut y = if l == 0 {
        DyadicTorus::ZERO
    } else {
        let m = 1u128 << l;
        let inv = mod_inverse_pow2(u % m, l);
        DyadicTorus::new(((x.num() as u128 * inv) % m) as i128, l)?
    };
    if l + s > MAX_LEVEL && !y.is_zero() {
        return Err(Error::LevelOverflow((l + s) as u32));
    }
    for _ in 0..s {
        y = y.halve()?;
    }
    Ok(y)
}

/// Inverse of an odd `u` modulo `2^l` (Newton iteration).
fn mod_inverse_pow2(u: u128, l: u8) -> u128 {
    let m = if l >= 128 { u128::MAX } else { (1u128 << l) - 1 };
    let mut x: u128 = 1;
    for _ in 0..7 {
        x = x.wrapping_mul(2u128.wrapping_sub(u.wrapping_mul(x)));
    }
    x & m
}

fn val2(x: u64) -> u32 {
    x.trailing_zeros()
}

/// Solves `A f = b (mod 2^r)`; `None` when no solution exists.
pub fn solve_mod_2r(rows: &[Vec<i64>], rhs: &[u64], r: u8) -> Option<Vec<u64>> {
    assert!(r >= 1 && r <= 62);
    let mask = (1u64 << r) - 1;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |v| v.len());
    let red = |x: i64| (x as i128).rem_euclid(1i128 << r) as u64;
    let mut a: Vec<Vec<u64>> = rows.iter().map(|row| row.iter().map(|&x| red(x)).collect()).collect();
    let mut b: Vec<u64> = rhs.iter().map(|&x| x & mask).collect();
    // Column transform: f = V g.
    let mut v: Vec<Vec<u64>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| (i == j) as u64).collect())
        .collect();
    let mut diag = Vec::new();
    for p in 0..nrows.min(ncols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(p) {
            for (j, &x) in row.iter().enumerate().skip(p) {
                if x != 0 && best.map_or(true, |(bv, _, _)| val2(x) < bv) {
                    best = Some((val2(x), i, j));
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((e, pi, pj)) = best else { break };
        a.swap(p, pi);
        b.swap(p, pi);
        for row in a.iter_mut() {
            row.swap(p, pj);
        }
        for row in v.iter_mut() {
            row.swap(p, pj);
        }
        let unit = a[p][p] >> e;
        let inv = mod_inverse_pow2(unit as u128, r) as u64;
        for x in a[p].iter_mut() {
            *x = x.wrapping_mul(inv) & mask;
        }
        b[p] = b[p].wrapping_mul(inv) & mask;
        let prow = a[p].clone();
        for i in p + 1..nrows {
            let x = a[i][p];
            if x != 0 {
                let q = x >> e;
                for (y, &pv) in a[i].iter_mut().zip(&prow) {
                    *y = y.wrapping_sub(q.wrapping_mul(pv)) & mask;
                }
                b[i] = b[i].wrapping_sub(q.wrapping_mul(b[p])) & mask;
            }
        }
        for j in p + 1..ncols {
            let x = a[p][j];
            if x != 0 {
                let q = x >> e;
                a[p][j] = 0;
                for row in v.iter_mut() {
                    row[j] = row[j].wrapping_sub(q.wrapping_mul(row[p])) & mask;
                }
            }
        }
        diag.push(e);
    }
    let rank = diag.len();
    if b[rank..].iter().any(|&x| x != 0) {
        return None;
    }
    let mut g = vec![0u64; ncols];
    for (p, &e) in diag.iter().enumerate() {
        if b[p] & ((1u64 << e) - 1) != 0 {
            return None;
        }
        g[p] = b[p] >> e;
    }
    let f: Vec<u64> = (0..ncols)
        .map(|i| {
            (0..ncols).fold(0u64, |acc, j| acc.wrapping_add(v[i][j].wrapping_mul(g[j]))) & mask
        })
        .collect();
    let ok = rows.iter().zip(rhs).all(|(row, &bb)| {
        row.iter()
            .zip(&f)
            .fold(0u64, |acc, (&x, &y)| acc.wrapping_add(red(x).wrapping_mul(y)))
            & mask
            == bb & mask
    });
    ok.then_some(f)
}
