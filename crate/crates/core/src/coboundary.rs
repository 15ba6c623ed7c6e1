//! Deciding whether a cocycle is `d^{k+1} F` for some `F: X -> T`.
//!
//! Each cube `c` gives the equation `sum_w (-1)^{k+1-|w|} F(c_w) = rho(c)`,
//! an integer row over the points of X. Rows are deduplicated and handed to
//! the torus lattice (which also yields a kernel certificate on failure) or
//! to the `Z/2^r` eliminator.

use std::collections::HashSet;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cocycle::{alternating_sum, decode_cube, CocycleHandle};
use crate::cube::FilteredGroup;
use crate::dyadic::DyadicTorus;
use crate::error::{Error, Result};
use crate::linsolve::{solve_mod_2r, TorusLattice};
use crate::table::FuncTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Torus,
    /// Potentials valued in `(1/2^r)Z/Z`.
    Level(u8),
}

pub enum CubeSource {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
    Given(Vec<Vec<u64>>),
    /// Given cubes followed by seeded samples.
    Mixed { given: Vec<Vec<u64>>, count: u64, seed: u64 },
}

/// Integer combination of cube equations whose left sides cancel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelCertificate {
    /// `(Host-Kra parameters of a cube, coefficient)`.
    pub terms: Vec<(Vec<u64>, i64)>,
    /// `sum coefficient * rho(cube)`, nonzero for a valid certificate.
    pub pairing: DyadicTorus,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    #[serde(skip)]
    pub witness: Option<FuncTable>,
    pub certificate: Option<KernelCertificate>,
    pub equations: u64,
    pub distinct_rows: usize,
    pub exhaustive: bool,
    pub target: String,
    pub note: Option<String>,
}

const EXHAUSTIVE_BITS: u32 = 24;

/// Integer row of the equation attached to a cube (by point index).
pub fn equation_row(space: &FilteredGroup, params: &[u64]) -> Vec<i64> {
    let t = space.tuple(params);
    let m = t.len().trailing_zeros();
    let mut row = vec![0i64; space.order() as usize];
    for (w, &p) in t.iter().enumerate() {
        row[p as usize] += if (m - w.count_ones()) % 2 == 0 { 1 } else { -1 };
    }
    row
}

struct System {
    rows: Vec<Vec<i64>>,
    rhs: Vec<DyadicTorus>,
    cubes: Vec<Vec<u64>>,
    equations: u64,
}

fn assemble(rho: &CocycleHandle, source: &CubeSource) -> Result<(System, bool)> {
    let g = &rho.space;
    if g.order() > 1 << 16 {
        return Err(Error::Budget(format!("space with {} points", g.order())));
    }
    let mut sys = System {
        rows: Vec::new(),
        rhs: Vec::new(),
        cubes: Vec::new(),
        equations: 0,
    };
    let m = rho.dim();
    let sample = |count: u64, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| rho.random_params(&mut rng)).collect::<Vec<_>>()
    };
    let (cubes, exhaustive): (Box<dyn Iterator<Item = Vec<u64>>>, bool) = match source {
        CubeSource::Exhaustive => {
            let bits = rho.cube_space_bits();
            if bits > EXHAUSTIVE_BITS {
                return Err(Error::Budget(format!("2^{bits} cubes")));
            }
            (Box::new((0..1u64 << bits).map(move |c| decode_cube(g, m, c))), true)
        }
        CubeSource::Sampled { count, seed } => (Box::new(sample(*count, *seed).into_iter()), false),
        CubeSource::Given(cubes) => (Box::new(cubes.iter().cloned()), false),
        CubeSource::Mixed { given, count, seed } => (
            Box::new(given.iter().cloned().chain(sample(*count, *seed))),
            false,
        ),
    };
    let mut seen: HashSet<(Vec<i64>, DyadicTorus)> = HashSet::new();
    for h in cubes {
        let row = equation_row(g, &h);
        let v = rho.eval_params(&h);
        sys.equations += 1;
        if seen.insert((row.clone(), v)) {
            sys.rows.push(row);
            sys.rhs.push(v);
            sys.cubes.push(h);
        }
    }
    Ok((sys, exhaustive))
}

/// Decides solvability of `d^{k+1} F = rho` on the chosen equations.
///
/// `Yes` requires the equation set to be exhaustive; a solvable sampled
/// system is reported as `Inconclusive`.
pub fn decide_coboundary(rho: &CocycleHandle, target: Target, source: CubeSource) -> Result<Verdict> {
    let (sys, exhaustive) = assemble(rho, &source)?;
    let g = &rho.space;
    let npts = g.order() as usize;
    let mut verdict = Verdict {
        decision: Decision::Inconclusive,
        witness: None,
        certificate: None,
        equations: sys.equations,
        distinct_rows: sys.rows.len(),
        exhaustive,
        target: match target {
            Target::Torus => "torus".into(),
            Target::Level(r) => format!("level {r}"),
        },
        note: None,
    };
    let witness: Option<Vec<DyadicTorus>> = match target {
        Target::Torus => {
            let mut lat = TorusLattice::new(npts);
            for (i, (row, &b)) in sys.rows.iter().zip(&sys.rhs).enumerate() {
                lat.push(i, row, b)?;
                if lat.failure().is_some() {
                    break;
                }
            }
            if let Some(rel) = lat.failure() {
                let mut terms = Vec::new();
                for &(i, c) in &rel.coeffs {
                    let c = i64::try_from(c)
                        .map_err(|_| Error::Budget("certificate coefficient overflow".into()))?;
                    terms.push((sys.cubes[i].clone(), c));
                }
                verdict.certificate = Some(KernelCertificate {
                    terms,
                    pairing: rel.pairing,
                });
                None
            } else {
                Some(lat.solve()?)
            }
        }
        Target::Level(r) => {
            if let Some(v) = sys.rhs.iter().find(|v| v.level() > r) {
                verdict.note = Some(format!("cocycle value {v} lies outside level {r}"));
                None
            } else {
                let rhs: Vec<u64> = sys.rhs.iter().map(|v| v.numerator_at(r)).collect();
                solve_mod_2r(&sys.rows, &rhs, r).map(|f| {
                    f.into_iter()
                        .map(|x| DyadicTorus::new(x as i128, r).unwrap())
                        .collect()
                })
            }
        }
    };
    match witness {
        None => verdict.decision = Decision::No,
        Some(vals) => {
            let n = npts.trailing_zeros() as usize;
            let f = FuncTable::from_values(n, &vals);
            let ok = sys.cubes.iter().zip(&sys.rhs).all(|(h, &v)| {
                alternating_sum(&g.tuple(h), |p| f.get(p as u32)) == v
            });
            if !ok {
                return Err(Error::Certification("solver witness fails its own equations".into()));
            }
            verdict.decision = if exhaustive {
                Decision::Yes
            } else {
                Decision::Inconclusive
            };
            verdict.witness = Some(f);
        }
    }
    Ok(verdict)
}

/// Re-derives the certificate from scratch: the combined row must vanish and
/// the pairing with rho must be the stated nonzero value.
pub fn verify_certificate(rho: &CocycleHandle, cert: &KernelCertificate) -> bool {
    let g = &rho.space;
    let mut total = vec![0i64; g.order() as usize];
    let mut pairing = DyadicTorus::ZERO;
    for (h, c) in &cert.terms {
        let t = g.tuple(h);
        let m = t.len().trailing_zeros();
        if t.len() != 1 << rho.dim() || !g.is_cube_params(h) {
            return false;
        }
        for (w, &p) in t.iter().enumerate() {
            let s = if (m - w.count_ones()) % 2 == 0 { 1 } else { -1 };
            total[p as usize] += s * c;
        }
        pairing += rho.eval_params(h).mul_int(*c);
    }
    total.iter().all(|&x| x == 0) && pairing == cert.pairing && !pairing.is_zero()
}

impl FilteredGroup {
    /// Whether `h` are valid Host-Kra parameters.
    pub fn is_cube_params(&self, h: &[u64]) -> bool {
        h.iter()
            .enumerate()
            .all(|(a, &x)| self.in_level(x, a.count_ones() as usize))
    }
}

/// Evaluates a certificate against `d^{k+1} F`; zero for every F when the
/// certificate is a genuine kernel vector.
pub fn pair_with_coboundary(space: &FilteredGroup, cert: &KernelCertificate, f: &FuncTable) -> DyadicTorus {
    cert.terms
        .iter()
        .map(|(h, c)| alternating_sum(&space.tuple(h), |p| f.get(p as u32)).mul_int(*c))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{coboundary_of, trilinear_cocycle};

    #[test]
    fn trilinear_is_not_a_coboundary() {
        let rho = trilinear_cocycle();
        let v = decide_coboundary(&rho, Target::Torus, CubeSource::Exhaustive).unwrap();
        assert_eq!(v.decision, Decision::No);
        let cert = v.certificate.unwrap();
        assert!(verify_certificate(&rho, &cert));
        let v = decide_coboundary(&rho, Target::Level(6), CubeSource::Exhaustive).unwrap();
        assert_eq!(v.decision, Decision::No);
    }

    #[test]
    fn coboundary_is_recognized() {
        let f = FuncTable::from_fn(2, |x| DyadicTorus::new((x * x + 3) as i128, 3).unwrap());
        let rho = coboundary_of(FilteredGroup::f2(2, 1), 2, &f);
        for target in [Target::Torus, Target::Level(3)] {
            let v = decide_coboundary(&rho, target, CubeSource::Exhaustive).unwrap();
            assert_eq!(v.decision, Decision::Yes);
        }
        let v = decide_coboundary(&rho, Target::Torus, CubeSource::Sampled { count: 50, seed: 1 }).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
    }
}
