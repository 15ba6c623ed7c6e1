//! Gowers norms `U^{k+1}(F_2^n)` of phases `e(f)`, by two independent routes,
//! and correlations with polynomial phases.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::mask;
use crate::error::{Error, Result};
use crate::poly::{degree_test, PolyRep};
use crate::rho::{Rho, PARTITIONS};
use crate::table::{FuncTable, Phase};

const NAIVE_BITS: usize = 30;
const RECURSIVE_BITS: usize = 30;

/// Compensated summation.
#[derive(Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum
    }
}

fn kahan_sum(it: impl IntoIterator<Item = f64>) -> f64 {
    let mut k = Kahan::default();
    for v in it {
        k.add(v);
    }
    k.value()
}

fn dense(f: &(impl Phase + ?Sized)) -> Result<FuncTable> {
    if f.dim() > crate::bits::MAX_DIM {
        return Err(Error::Budget(format!("dense table on 2^{} points", f.dim())));
    }
    Ok(FuncTable::from_fn(f.dim(), |x| f.eval(x)))
}

/// Residue counts: dense for levels up to 16.
#[derive(Clone)]
enum Hist {
    Dense(Vec<u64>),
    Sparse(BTreeMap<u64, u64>),
}

impl Hist {
    fn new(l: u8) -> Self {
        if l <= 16 {
            Hist::Dense(vec![0; 1 << l])
        } else {
            Hist::Sparse(BTreeMap::new())
        }
    }
    #[inline]
    fn add(&mut self, v: u64) {
        match self {
            Hist::Dense(a) => a[v as usize] += 1,
            Hist::Sparse(m) => *m.entry(v).or_default() += 1,
        }
    }
    fn merge(mut self, o: Hist) -> Hist {
        for (v, c) in o.entries() {
            match &mut self {
                Hist::Dense(a) => a[v as usize] += c,
                Hist::Sparse(m) => *m.entry(v).or_default() += c,
            }
        }
        self
    }
    fn entries(&self) -> Vec<(u64, u64)> {
        match self {
            Hist::Dense(a) => a.iter().enumerate().filter(|(_, &c)| c > 0).map(|(v, &c)| (v as u64, c)).collect(),
            Hist::Sparse(m) => m.iter().map(|(&v, &c)| (v, c)).collect(),
        }
    }
}

/// Residue histogram of `d^m f` over every tuple `(x, h_1..h_m)`.
fn histogram(t: &FuncTable, m: usize) -> Hist {
    let l = t.level();
    let mk = mask(l);
    let size = 1usize << t.n();
    fn rec(g: &[u64], depth: usize, mk: u64, hist: &mut Hist) {
        let size = g.len();
        if depth == 0 {
            for &v in g {
                hist.add(v);
            }
            return;
        }
        let mut d = vec![0u64; size];
        for h in 0..size {
            for x in 0..size {
                d[x] = g[x ^ h].wrapping_sub(g[x]) & mk;
            }
            rec(&d, depth - 1, mk, hist);
        }
    }
    let g = t.nums();
    if m == 0 {
        let mut hist = Hist::new(l);
        rec(g, 0, mk, &mut hist);
        return hist;
    }
    (0..size)
        .into_par_iter()
        .fold(
            || Hist::new(l),
            |mut hist, h| {
                let d: Vec<u64> = (0..size).map(|x| g[x ^ h].wrapping_sub(g[x]) & mk).collect();
                rec(&d, m - 1, mk, &mut hist);
                hist
            },
        )
        .reduce(|| Hist::new(l), Hist::merge)
}

/// `||e(f)||_{U^{k+1}}` straight from the definition: the average of
/// `e(d^{k+1} f)` over all tuples, from an exact histogram of residues.
pub fn gowers_norm_naive(f: &(impl Phase + ?Sized), k: usize) -> Result<f64> {
    let n = f.dim();
    if (k + 2) * n > NAIVE_BITS {
        return Err(Error::Budget(format!(
            "naive U^{} on F_2^{n} needs 2^{} tuples (limit 2^{NAIVE_BITS})",
            k + 1,
            (k + 2) * n
        )));
    }
    let t = dense(f)?;
    let hist = histogram(&t, k + 1);
    let l = t.level();
    let denom = (1u64 << l) as f64;
    let entries = hist.entries();
    let total: u64 = entries.iter().map(|e| e.1).sum();
    let avg = kahan_sum(entries.iter().map(|&(v, c)| c as f64 * (TAU * v as f64 / denom).cos())) / total as f64;
    Ok(root(avg, k + 1))
}

fn root(v: f64, m: usize) -> f64 {
    v.max(0.0).powf(1.0 / (1u64 << m) as f64)
}

/// `||g||_{U^j}^{2^j}` by `E_h ||Delta_h g||_{U^{j-1}}^{2^{j-1}}`, ending in
/// `|E e(g)|^2`.
fn power_rec(g: &[u64], j: usize, l: u8, phases: &[Complex64]) -> f64 {
    let size = g.len();
    let mk = mask(l);
    if j == 1 {
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for &v in g {
            let z = phase(v, l, phases);
            re.add(z.re);
            im.add(z.im);
        }
        let z = Complex64::new(re.value(), im.value()) / size as f64;
        return z.norm_sqr();
    }
    let mut d = vec![0u64; size];
    let mut acc = Kahan::default();
    for h in 0..size {
        for x in 0..size {
            d[x] = g[x ^ h].wrapping_sub(g[x]) & mk;
        }
        acc.add(power_rec(&d, j - 1, l, phases));
    }
    acc.value() / size as f64
}

fn phase(v: u64, l: u8, table: &[Complex64]) -> Complex64 {
    if (v as usize) < table.len() {
        table[v as usize]
    } else {
        Complex64::from_polar(1.0, TAU * v as f64 / (1u64 << l) as f64)
    }
}

/// The same norm through the derivative recursion, parallel over the
/// outermost shift and reduced in a fixed order.
pub fn gowers_norm_recursive(f: &(impl Phase + ?Sized), k: usize) -> Result<f64> {
    let n = f.dim();
    if (k + 1) * n > RECURSIVE_BITS {
        return Err(Error::Budget(format!(
            "recursive U^{} on F_2^{n} needs about 2^{} steps (limit 2^{RECURSIVE_BITS})",
            k + 1,
            (k + 1) * n
        )));
    }
    let t = dense(f)?;
    let l = t.level();
    let phases: Vec<Complex64> = if l <= 16 {
        (0..1u64 << l)
            .map(|v| Complex64::from_polar(1.0, TAU * v as f64 / (1u64 << l) as f64))
            .collect()
    } else {
        Vec::new()
    };
    let g = t.nums();
    let m = k + 1;
    let size = g.len();
    let p = if m == 1 {
        power_rec(g, 1, l, &phases)
    } else {
        let mk = mask(l);
        let parts: Vec<f64> = (0..size)
            .into_par_iter()
            .map(|h| {
                let d: Vec<u64> = (0..size).map(|x| g[x ^ h].wrapping_sub(g[x]) & mk).collect();
                power_rec(&d, m - 1, l, &phases)
            })
            .collect();
        kahan_sum(parts) / size as f64
    };
    Ok(root(p, m))
}

/// Exact stand-in for `||e(P)||_{U^{k+1}} = 1`: true iff `d^{k+1} P = 0`.
pub fn poly_norm_one_certificate(p: &PolyRep, k: usize) -> bool {
    if p.n() <= crate::bits::MAX_DIM {
        degree_test(&p.to_table(), k as i32)
    } else {
        p.widen(k, p.level()).is_ok()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Correlation {
    pub magnitude: f64,
    /// `(#{f - P = 0} - #{f - P = 1/2}, 2^n)` when `f - P` is (1/2)Z/Z-valued.
    pub exact: Option<(i64, u64)>,
}

/// `|E_x e(f(x) - P(x))|`.
pub fn correlation(f: &(impl Phase + ?Sized), p: &(impl Phase + ?Sized)) -> Result<Correlation> {
    if f.dim() != p.dim() {
        return Err(Error::Dimension(format!("f on F_2^{}, P on F_2^{}", f.dim(), p.dim())));
    }
    let n = f.dim();
    let diffs: Vec<_> = (0..1u32 << n).map(|x| f.eval(x) - p.eval(x)).collect();
    let half = diffs.iter().all(|d| d.level() <= 1);
    let exact = half.then(|| {
        let ones = diffs.iter().filter(|d| !d.is_zero()).count() as i64;
        ((1i64 << n) - 2 * ones, 1u64 << n)
    });
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for d in &diffs {
        let z = d.e_phase();
        re.add(z.re);
        im.add(z.im);
    }
    let magnitude = Complex64::new(re.value(), im.value()).norm() / (1u64 << n) as f64;
    Ok(Correlation { magnitude, exact })
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitConstant {
    /// `E e(rho)` over the pair parameters, as `numerator / 2^30`.
    pub mean_numerator: i64,
    pub mean: f64,
    /// `mean^(1/64)`.
    pub c_star: f64,
}

/// `c* = (E e(rho))^{1/64}`. For fixed `h^(1)` the form is linear in `h^(2)`,
/// so the mean is the fraction of `h^(1)` whose linear coefficient vanishes.
pub fn limit_constant() -> LimitConstant {
    let zero = (0u32..1 << 15)
        .into_par_iter()
        .filter(|&h1| {
            PARTITIONS.iter().fold(0u16, |acc, &[p, q, r]| {
                acc ^ (((h1 >> p) & (h1 >> q) & 1) as u16) << r
            }) == 0
        })
        .count() as i64;
    let mean_numerator = zero << 15;
    let mean = mean_numerator as f64 / (1u64 << 30) as f64;
    LimitConstant {
        mean_numerator,
        mean,
        c_star: mean.powf(1.0 / 64.0),
    }
}

/// Brute-force `sum e(rho)` over all 2^30 pair parameters, 64 values of
/// `h^(2)` at a time.
pub fn rho_character_sum(rho: &Rho) -> i64 {
    // Lane masks for the low six bits of h^(2).
    let lanes: [u64; 6] = std::array::from_fn(|b| (0..64u64).fold(0, |a, l| a | (l >> b & 1) << l));
    (0u32..1 << 15)
        .into_par_iter()
        .map(|h1| {
            let mut s = 0i64;
            for word in 0..(1u32 << 15) / 64 {
                let h2 = |r: u8| -> u64 {
                    if r < 6 {
                        lanes[r as usize]
                    } else {
                        0u64.wrapping_sub((word >> (r - 6) & 1) as u64)
                    }
                };
                let bits = rho.table().iter().fold(0u64, |acc, &[p, q, r]| {
                    acc ^ (0u64.wrapping_sub((h1 >> p & h1 >> q & 1) as u64) & h2(r))
                });
                s += 64 - 2 * bits.count_ones() as i64;
            }
            s
        })
        .sum()
}
