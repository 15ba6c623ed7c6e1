//! Constructive potentials for 2-homogeneous cocycles on `D^1(F_2^n)`.
//!
//! [`potential_finder`] follows the double induction: on the order `k`
//! (potentials `F_h` of the slices `rho_h`) and then on the dimension, where
//! [`solve_phi`] finds `phi` with `F_h - d_h phi` of degree `k-1` for all `h`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::CocycleHandle;
use crate::cube::{morphism_check, FilteredGroup};
use crate::dyadic::DyadicTorus;
use crate::error::{Error, Result};
use crate::poly::{exact_root, invert_one_plus_shift, reduce_mod_poly, PolyRep};
use crate::table::FuncTable;

/// Largest `n (k+2)` for which the result is re-checked on every tuple.
const VERIFY_BITS: u32 = 24;
const BUDGET_BITS: usize = 30;

type Slice<'a> = dyn Fn(u32, &[u32]) -> DyadicTorus + Sync + 'a;

#[derive(Clone, Debug, Serialize)]
pub struct Potential {
    #[serde(skip)]
    pub table: FuncTable,
    pub input_level: u8,
    pub level: u8,
    pub exhaustive: bool,
    pub checked: u64,
}

fn check_space(rho: &CocycleHandle) -> Result<usize> {
    let g = &rho.space;
    if g.degree() != 1 || g.exps().iter().any(|&r| r != 1) {
        return Err(Error::Precondition("potentials are built on D^1(F_2^n)".into()));
    }
    let n = g.exps().len();
    if n * (rho.k + 1) > BUDGET_BITS {
        return Err(Error::Budget(format!("2^{} slice evaluations", n * (rho.k + 1))));
    }
    Ok(n)
}

/// Some `F` with `d^{k+1} F = rho`, reduced modulo `Poly^k`.
pub fn potential_finder(rho: &CocycleHandle, samples: u64, seed: u64) -> Result<Potential> {
    let n = check_space(rho)?;
    let k = rho.k;
    let slice = |x: u32, hs: &[u32]| {
        let hs: Vec<u64> = hs.iter().map(|&h| h as u64).collect();
        rho.eval_at(x as u64, &hs)
    };
    let f = potential_rec(n, k, &slice)?;
    let f = reduce_mod_poly(&f, k as i32);
    let (exhaustive, checked) = verify(rho, &f, samples, seed)?;
    Ok(Potential {
        input_level: rho.level,
        level: f.level(),
        table: f,
        exhaustive,
        checked,
    })
}

fn potential_rec(n: usize, k: usize, rho: &Slice) -> Result<FuncTable> {
    if k == 0 {
        return Ok(FuncTable::from_fn(n, |x| rho(0, &[x])));
    }
    let family: Vec<FuncTable> = (0..1u32 << n)
        .into_par_iter()
        .map(|h1| {
            let sub = move |x: u32, hs: &[u32]| {
                let mut v = Vec::with_capacity(hs.len() + 1);
                v.push(h1);
                v.extend_from_slice(hs);
                rho(x, &v)
            };
            potential_rec(n, k - 1, &sub).map(|f| reduce_mod_poly(&f, k as i32 - 1))
        })
        .collect::<Result<_>>()?;
    solve_phi(&family, n, k)
}

/// Given `F_h` (indexed by `h` in F_2^m) satisfying the quasi-cocycle and
/// curl conditions of order `k >= 1`, returns `phi` with
/// `F_h - d_h phi` in `Poly^{k-1}` for every `h`.
pub fn solve_phi(family: &[FuncTable], m: usize, k: usize) -> Result<FuncTable> {
    if m == 0 {
        return Ok(FuncTable::zeros(0));
    }
    let e = 1u32 << (m - 1);
    let fe = &family[e as usize];
    let a = fe.add(&fe.shift(e));
    let d = k.saturating_sub(2);
    let p = PolyRep::from_table(&a, d).map_err(|_| Error::NotPolynomial {
        degree: d as i32,
        detail: format!(
            "(1+T^e)F_e has degree above {d} for e = e_{m}; the cocycle is not 2-homogeneous"
        ),
    })?;
    let fp = invert_one_plus_shift(&p, e)?.to_table();
    let diff = fe.sub(&fp);
    let phi = FuncTable::from_fn(m, |x| if x & e != 0 { diff.get(x ^ e) } else { DyadicTorus::ZERO });
    let half = 1u32 << (m - 1);
    let reduced: Vec<FuncTable> = (0..half)
        .map(|h| {
            let f2 = family[h as usize].sub(&fp).sub(&phi.derivative(h));
            let r = FuncTable::from_values(m - 1, &f2.values()[..half as usize]);
            reduce_mod_poly(&r, k as i32 - 1)
        })
        .collect();
    let inner = solve_phi(&reduced, m - 1, k)?;
    let lifted = FuncTable::from_fn(m, |x| inner.get(x & (half - 1)));
    Ok(reduce_mod_poly(&phi.add(&lifted), k as i32))
}

fn verify(rho: &CocycleHandle, f: &FuncTable, samples: u64, seed: u64) -> Result<(bool, u64)> {
    let n = f.n();
    let k1 = rho.k + 1;
    let bits = (n * (k1 + 1)) as u32;
    let mask = (1u64 << n) - 1;
    let check = |code: u64| -> bool {
        let x = code & mask;
        let hs: Vec<u64> = (0..k1).map(|i| code >> (n * (i + 1)) & mask).collect();
        let lhs = (0u32..1 << k1)
            .map(|w| {
                let p = hs.iter().enumerate().fold(x, |acc, (i, &h)| if w >> i & 1 == 1 { acc ^ h } else { acc });
                let v = f.get(p as u32);
                if (k1 as u32 - w.count_ones()) % 2 == 0 { v } else { -v }
            })
            .sum::<DyadicTorus>();
        lhs == rho.eval_at(x, &hs)
    };
    let (exhaustive, codes): (bool, Vec<u64>) = if bits <= VERIFY_BITS {
        (true, (0..1u64 << bits).collect())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (false, (0..samples).map(|_| rng.gen::<u64>() & ((1u64 << bits.min(63)) - 1)).collect())
    };
    if let Some(bad) = codes.par_iter().find_any(|&&c| !check(c)) {
        return Err(Error::Certification(format!(
            "potential fails d^{k1} F = rho at tuple code {bad:#x}"
        )));
    }
    Ok((exhaustive, codes.len() as u64))
}

/// Edge functions on `C^1(F_2^n)`: index `x | h << n` for the edge `(x, x+h)`.
pub fn edge_index(n: usize, x: u32, h: u32) -> u32 {
    x | h << n
}

/// `d^k psi` at a (k+1)-cube `(x, h_1..h_{k+1})`, the last coordinate being
/// the edge direction.
pub fn d_k_of_edge(psi: &FuncTable, n: usize, x: u64, hs: &[u64]) -> DyadicTorus {
    let k = hs.len() - 1;
    let top = hs[k] as u32;
    (0u32..1 << k)
        .map(|w| {
            let p = (0..k).fold(x, |acc, i| if w >> i & 1 == 1 { acc ^ hs[i] } else { acc }) as u32;
            let v = psi.get(edge_index(n, p, top));
            if (k as u32 - w.count_ones()) % 2 == 0 { v } else { -v }
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongPotential {
    #[serde(skip)]
    pub table: FuncTable,
    pub preconditions_exhaustive: bool,
    pub potential: Potential,
}

/// A `(1/2)Z/Z`-valued potential for a strongly 2-homogeneous cocycle with
/// edge witness `psi`.
pub fn strong_potential_finder(
    rho: &CocycleHandle,
    psi: &FuncTable,
    samples: u64,
    seed: u64,
) -> Result<StrongPotential> {
    let n = check_space(rho)?;
    let k = rho.k;
    if k < 3 {
        return Err(Error::Precondition("strong 2-homogeneity needs k >= 3".into()));
    }
    if psi.n() != 2 * n {
        return Err(Error::Dimension(format!("edge witness must live on 2n = {} bits", 2 * n)));
    }
    let bits = (n * (k + 2)) as u32;
    let mask = (1u64 << n) - 1;
    let exhaustive = bits <= VERIFY_BITS;
    let codes: Vec<u64> = if exhaustive {
        (0..1u64 << bits).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157);
        (0..samples).map(|_| rng.gen::<u64>() & ((1u64 << bits.min(63)) - 1)).collect()
    };
    let bad = codes.par_iter().find_any(|&&code| {
        let x = code & mask;
        let hs: Vec<u64> = (0..=k).map(|i| code >> (n * (i + 1)) & mask).collect();
        let v = rho.eval_at(x, &hs);
        v.level() > 1 || d_k_of_edge(psi, n, x, &hs) != v
    });
    if let Some(code) = bad {
        return Err(Error::Precondition(format!(
            "rho is not (1/2)Z/Z-valued with rho = d^{k} psi (tuple code {code:#x})"
        )));
    }
    let two_psi = psi.scale(2);
    let l = two_psi.level().max(1);
    let src = FilteredGroup::f2(n, 1).host_kra(1);
    let nums = two_psi.nums_at(l);
    if !morphism_check(&src, &FilteredGroup::torus(l, k - 2), &|p| nums[p as usize])? {
        return Err(Error::Precondition(format!("2 psi is not of degree {} on C^1", k - 2)));
    }
    let pot = potential_finder(rho, samples, seed)?;
    let twice = pot.table.scale(2);
    let p = PolyRep::from_table(&twice, k - 1).map_err(|_| {
        Error::Certification(format!("2F is not of degree {} as the argument requires", k - 1))
    })?;
    let root = exact_root(&p)?.to_table();
    let out = pot.table.sub(&root);
    debug_assert!(out.level() <= 1);
    Ok(StrongPotential {
        table: out,
        preconditions_exhaustive: exhaustive,
        potential: pot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{coboundary_of, trilinear_cocycle};

    #[test]
    fn order_zero_recovers_function_up_to_constant() {
        let f0 = FuncTable::from_fn(2, |x| DyadicTorus::new([3, 1, 7, 2][x as usize], 3).unwrap());
        let rho = coboundary_of(FilteredGroup::f2(2, 1), 0, &f0);
        let p = potential_finder(&rho, 0, 0).unwrap();
        let diff = p.table.sub(&f0);
        assert!((0..4).all(|x| diff.get(x) == diff.get(0)));
        assert!(p.exhaustive);
    }

    #[test]
    fn trilinear_form_is_rejected() {
        let err = potential_finder(&trilinear_cocycle(), 0, 0).unwrap_err();
        assert!(matches!(err, Error::NotPolynomial { .. }), "{err:?}");
    }

    #[test]
    fn zero_cocycle_gives_zero() {
        let z = FuncTable::zeros(2);
        let rho = coboundary_of(FilteredGroup::f2(2, 1), 3, &z);
        let psi = FuncTable::zeros(4);
        let s = strong_potential_finder(&rho, &psi, 0, 0).unwrap();
        assert!(s.table.is_zero());
    }
}
