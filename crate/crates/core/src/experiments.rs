//! Equidistribution of sampled restricted cubes and the conditional
//! expectation probe.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::DyadicTorus;
use crate::error::{Error, Result};
use crate::gowers::{correlation, Kahan};
use crate::poly::{coeff_level_bound, monomials};
use crate::table::{FuncTable, Phase};
use crate::x5::{lift, sample_ncube_seeded, QuadPair, X5Point};

const ENUM_DIM: usize = 2;
const SIGMA_LEVEL: u8 = 5;
const CHUNK: u64 = 4096;

/// The restriction `(Q_0, S_0)` of an n-cube to `F_2^M`, plus `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionFrame {
    pub m: usize,
    pub d: usize,
    /// Vertices of `(Q_0, S_0)`, indexed by `a` in F_2^M.
    pub base: Vec<X5Point>,
}

impl RestrictionFrame {
    pub fn new(m: usize, d: usize, base: Vec<X5Point>) -> Result<Self> {
        if base.len() != 1 << m {
            return Err(Error::Dimension(format!("frame needs 2^{m} vertices")));
        }
        Ok(RestrictionFrame { m, d, base })
    }

    pub fn zero(m: usize, d: usize) -> Self {
        RestrictionFrame {
            m,
            d,
            base: vec![X5Point { q: 0, s: DyadicTorus::ZERO }; 1 << m],
        }
    }

    /// Restriction of `(q, s)` to the first `m` coordinates.
    pub fn from_cube(q: &QuadPair, s: &(impl Phase + ?Sized), m: usize, d: usize) -> Self {
        let base = (0..1u32 << m).map(|a| X5Point { q: q.eval(a), s: s.eval(a) }).collect();
        RestrictionFrame { m, d, base }
    }
}

/// All `(M+d)`-cubes of `X_{5,5}` agreeing with the frame on
/// `F_2^M x {0^d}`; vertex `(a, b)` sits at index `a | b << M`.
#[derive(Clone, Debug)]
pub struct SigmaSpace {
    pub frame: RestrictionFrame,
    pub elements: Vec<Vec<X5Point>>,
    /// `|K|`, the size of every fibre over a fixed `Q`.
    pub k_size: usize,
    /// Number of extensions of `Q_0`.
    pub q_count: usize,
    index: HashMap<Vec<X5Point>, usize>,
}

impl SigmaSpace {
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
    pub fn position(&self, cube: &[X5Point]) -> Option<usize> {
        self.index.get(cube).copied()
    }
}

/// Monomials of `F_2^{M+d}` meeting the last `d` coordinates, with the level
/// of their coefficient in `Poly^5 -> (1/32)Z/Z`.
fn k_generators(m: usize, d: usize) -> Vec<(u32, u8)> {
    let dim = m + d;
    let face = (1u32 << m) - 1;
    monomials(dim, dim)
        .into_iter()
        .filter(|&s| s & !face != 0)
        .filter_map(|s| coeff_level_bound(5, s.count_ones() as usize).map(|b| (s, b.min(SIGMA_LEVEL))))
        .filter(|&(_, l)| l > 0)
        .collect()
}

pub fn enumerate_sigma(frame: &RestrictionFrame) -> Result<SigmaSpace> {
    let (m, d) = (frame.m, frame.d);
    let dim = m + d;
    if dim > ENUM_DIM {
        return Err(Error::Budget(format!("Sigma enumeration needs M + d <= {ENUM_DIM}, got {dim}")));
    }
    let size = 1usize << dim;
    let face = 1usize << m;
    let gens = k_generators(m, d);
    let k_bits: u32 = gens.iter().map(|g| g.1 as u32).sum();
    let k_size = 1usize << k_bits;
    // K as value tables over F_2^dim.
    let k_tables: Vec<Vec<u64>> = (0..k_size as u64)
        .map(|mut code| {
            let mut vals = vec![0u64; size];
            for &(s, l) in &gens {
                let c = code & ((1 << l) - 1);
                code >>= l;
                for (x, v) in vals.iter_mut().enumerate() {
                    if s as usize & !x == 0 {
                        *v += c << (SIGMA_LEVEL - l);
                    }
                }
            }
            vals.iter().map(|v| v & 31).collect()
        })
        .collect();
    let free = size - face;
    let q_count = 1usize << (2 * free);
    let mut elements = Vec::with_capacity(q_count * k_size);
    for qcode in 0..q_count {
        let mut qv: Vec<u8> = vec![0; size];
        for (a, p) in frame.base.iter().enumerate() {
            qv[a] = p.q;
        }
        for j in 0..free {
            qv[face + j] = (qcode >> (2 * j) & 3) as u8;
        }
        let q = QuadPair::from_bits(dim, &qv)?;
        let s0 = lift(&q, SIGMA_LEVEL)?;
        // Shift by the frame offset pulled back along the projection to F_2^M.
        let offset: Vec<DyadicTorus> = (0..face).map(|a| frame.base[a].s - s0.eval_structural(a as u32)).collect();
        let base: Vec<DyadicTorus> = (0..size)
            .map(|x| s0.eval_structural(x as u32) + offset[x & (face - 1)])
            .collect();
        for kt in &k_tables {
            elements.push(
                (0..size)
                    .map(|x| X5Point {
                        q: qv[x],
                        s: base[x] + DyadicTorus::new(kt[x] as i128, SIGMA_LEVEL).unwrap(),
                    })
                    .collect(),
            );
        }
    }
    let index: HashMap<Vec<X5Point>, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    if index.len() != elements.len() {
        return Err(Error::Certification("Sigma enumeration produced duplicates".into()));
    }
    Ok(SigmaSpace {
        frame: frame.clone(),
        elements,
        k_size,
        q_count,
        index,
    })
}

/// `1/2 sum |counts/total - 1/len|`.
pub fn tv_to_uniform(counts: &[u64], total: u64) -> f64 {
    let u = 1.0 / counts.len() as f64;
    let mut k = Kahan::default();
    for &c in counts {
        k.add((c as f64 / total as f64 - u).abs());
    }
    k.value() / 2.0
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    let mut k = Kahan::default();
    for (a, b) in p.iter().zip(q) {
        k.add((a - b).abs());
    }
    k.value() / 2.0
}

#[derive(Clone, Debug, Serialize)]
pub struct TvReport {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub samples: u64,
    pub sigma_size: usize,
    pub k_size: usize,
    pub tv: f64,
    /// Samples whose restricted cube was not found in Sigma (must be 0).
    pub outside_sigma: u64,
    pub distinct_seen: usize,
    pub calibration_tv: f64,
    pub calibration_bound: f64,
}

impl TvReport {
    pub fn calibrated(&self) -> bool {
        self.calibration_tv <= self.calibration_bound
    }
}

/// Seeds of the per-chunk streams; fixed chunking keeps results independent
/// of the thread count.
fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(chunk);
    r
}

fn chunked_counts(samples: u64, seed: u64, len: usize, draw: impl Fn(&mut ChaCha8Rng) -> Option<usize> + Sync) -> (Vec<u64>, u64) {
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut counts = vec![0u64; len];
            let mut miss = 0;
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                match draw(&mut rng) {
                    Some(i) => counts[i] += 1,
                    None => miss += 1,
                }
            }
            (counts, miss)
        })
        .reduce(
            || (vec![0u64; len], 0),
            |(mut a, ma), (b, mb)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                (a, ma + mb)
            },
        )
}

/// Samples an n-cube of `X_{5,5}`, then `samples` restricted cubes along
/// `e_1..e_M, v_1..v_d` with uniform `v_i`, and compares with uniform on Sigma.
pub fn estimate_tv(n: usize, m: usize, d: usize, samples: u64, seed: u64) -> Result<TvReport> {
    if m > n || n > crate::x5::CACHE_DIM {
        return Err(Error::Precondition(format!("need M <= n <= {}", crate::x5::CACHE_DIM)));
    }
    let (q, s) = sample_ncube_seeded(n, SIGMA_LEVEL, seed)?;
    let s = s.with_cache();
    let qt = q.table();
    let frame = RestrictionFrame::from_cube(&q, &s, m, d);
    let sigma = enumerate_sigma(&frame)?;
    let nmask = (1u32 << n) - 1;
    let (counts, outside) = chunked_counts(samples, seed ^ 0x7e57, sigma.len(), |rng| {
        let vs: Vec<u32> = (0..d).map(|_| rng.gen::<u32>() & nmask).collect();
        let cube: Vec<X5Point> = (0..1u32 << (m + d))
            .map(|w| {
                let a = w & ((1 << m) - 1);
                let x = (0..d).fold(a, |acc, j| if w >> (m + j) & 1 == 1 { acc ^ vs[j] } else { acc });
                X5Point { q: qt[x as usize], s: s.eval(x) }
            })
            .collect();
        sigma.position(&cube)
    });
    let len = sigma.len();
    let (cal, _) = chunked_counts(samples, seed ^ 0xca1, len, |rng| Some(rng.gen_range(0..len)));
    Ok(TvReport {
        n,
        m,
        d,
        samples,
        sigma_size: len,
        k_size: sigma.k_size,
        tv: tv_to_uniform(&counts, samples - outside),
        outside_sigma: outside,
        distinct_seen: counts.iter().filter(|&&c| c > 0).count(),
        calibration_tv: tv_to_uniform(&cal, samples),
        calibration_bound: 3.0 * (len as f64 / samples as f64).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CondExpError {
    /// `E_x |e(target) - cell average|`.
    pub l1: f64,
    /// `(E_x |e(target) - cell average|^2)^(1/2)`.
    pub l2: f64,
    pub cells: usize,
    pub points: u64,
    pub ratio: f64,
    pub overfit: bool,
}

/// Error of the best approximation of `e(target)` by a function of the
/// generator values: each cell of equal generator tuples is replaced by its
/// average. Cells where the target is constant contribute exactly 0.
pub fn conditional_expectation_error(
    target: &(impl Phase + ?Sized),
    generators: &[&dyn Phase],
    n: usize,
) -> Result<CondExpError> {
    if target.dim() != n || generators.iter().any(|g| g.dim() != n) {
        return Err(Error::Dimension(format!("all functions must live on F_2^{n}")));
    }
    let mut cells: HashMap<Vec<DyadicTorus>, HashMap<DyadicTorus, u64>> = HashMap::new();
    for x in 0..1u32 << n {
        let key: Vec<DyadicTorus> = generators.iter().map(|g| g.eval(x)).collect();
        *cells.entry(key).or_default().entry(target.eval(x)).or_default() += 1;
    }
    let points = 1u64 << n;
    let mut l1 = Kahan::default();
    let mut l2 = Kahan::default();
    let mut keys: Vec<&Vec<DyadicTorus>> = cells.keys().collect();
    keys.sort();
    for key in keys {
        let hist = &cells[key];
        if hist.len() == 1 {
            continue;
        }
        let mut vals: Vec<(DyadicTorus, u64)> = hist.iter().map(|(&v, &c)| (v, c)).collect();
        vals.sort();
        let count: u64 = vals.iter().map(|v| v.1).sum();
        let (mut re, mut im) = (Kahan::default(), Kahan::default());
        for &(v, c) in &vals {
            let z = v.e_phase();
            re.add(c as f64 * z.re);
            im.add(c as f64 * z.im);
        }
        let avg = Complex64::new(re.value(), im.value()) / count as f64;
        for &(v, c) in &vals {
            let e = (v.e_phase() - avg).norm();
            l1.add(c as f64 * e);
            l2.add(c as f64 * e * e);
        }
    }
    let ncells = cells.len();
    Ok(CondExpError {
        l1: l1.value() / points as f64,
        l2: (l2.value() / points as f64).sqrt(),
        cells: ncells,
        points,
        ratio: ncells as f64 / points as f64,
        overfit: ncells as u64 >= points / 8,
    })
}

/// `x -> f(x + a)`.
pub struct Translate<'a, F: Phase + ?Sized> {
    pub f: &'a F,
    pub a: u32,
}

impl<F: Phase + ?Sized> Phase for Translate<'_, F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn eval(&self, x: u32) -> DyadicTorus {
        self.f.eval(x ^ self.a)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub r: u8,
    /// Target `e(P)`, generators the `2^M` translates of `S` along `F_2^M`.
    pub main: CondExpError,
    /// Target `e(S)` with the same generators (includes `a = 0`).
    pub control_target_in_generators: CondExpError,
    pub control_constant: CondExpError,
    pub correlation_s_p: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub main: ProbeRow,
    /// The same probe on `X_{5,1}`, where `P` is classical.
    pub contrast: ProbeRow,
}

fn probe_row(n: usize, m: usize, r: u8, seed: u64) -> Result<ProbeRow> {
    let (_, s) = sample_ncube_seeded(n, r, seed)?;
    let s = s.with_cache();
    let st = s.table();
    let p = s.p.to_table();
    let translates: Vec<Translate<FuncTable>> = (0..1u32 << m).map(|a| Translate { f: &st, a }).collect();
    let gens: Vec<&dyn Phase> = translates.iter().map(|t| t as &dyn Phase).collect();
    let constant = FuncTable::zeros(n);
    Ok(ProbeRow {
        r,
        main: conditional_expectation_error(&p, &gens, n)?,
        control_target_in_generators: conditional_expectation_error(&st, &gens, n)?,
        control_constant: conditional_expectation_error(&constant, &gens, n)?,
        correlation_s_p: correlation(&st, &p)?.magnitude,
    })
}

/// Probe for `X_{5,r}` with the `r = 1` contrast on the same seed.
pub fn measurability_probe(n: usize, m: usize, r: u8, seed: u64) -> Result<ProbeReport> {
    if n > 18 || m > n {
        return Err(Error::Precondition(format!("probe needs M <= n <= 18, got n = {n}, M = {m}")));
    }
    Ok(ProbeReport {
        n,
        m,
        seed,
        main: probe_row(n, m, r, seed)?,
        contrast: probe_row(n, m, 1, seed)?,
    })
}
