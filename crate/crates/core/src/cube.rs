//! Filtered abelian 2-groups and their Host-Kra cube sets.
//!
//! A group is a product of cyclic factors `Z/2^r_j`; element `x` is packed
//! into a `u64` with factor `j` occupying `r_j` bits. Filtration levels are
//! split: `G_i = prod_j 2^t_ij Z/2^r_j`, and `G_i = 0` past the last level.
//! A tuple `(x_w)` indexed by w in {0,1}^m is a cube iff its Host-Kra
//! parameters `h_a = sum_{b <= a} (-1)^{|a|-|b|} x_b` satisfy `h_a in G_{|a|}`.

use crate::error::{Error, Result};

/// Spaces whose cubes can be tested.
pub trait CubeSpace {
    type Point: Clone + PartialEq + std::fmt::Debug;
    /// `t` has length `2^m`, vertex `w` at index `w` (bit i-1 = w_i).
    fn is_cube(&self, t: &[Self::Point]) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredGroup {
    exps: Vec<u8>,
    offsets: Vec<u8>,
    /// `steps[i][j] = t_ij` for `i = 0..=degree`.
    steps: Vec<Vec<u8>>,
    all_binary: bool,
}

/// Host-Kra parameters `h_a`, indexed like the tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HkParam {
    pub m: usize,
    pub h: Vec<u64>,
}

impl FilteredGroup {
    pub fn new(exps: Vec<u8>, steps: Vec<Vec<u8>>) -> Result<Self> {
        let total: u32 = exps.iter().map(|&r| r as u32).sum();
        if total > 63 {
            return Err(Error::Precondition("group too large to pack".into()));
        }
        for (i, row) in steps.iter().enumerate() {
            if row.len() != exps.len() {
                return Err(Error::Dimension("filtration row has the wrong length".into()));
            }
            for (j, &t) in row.iter().enumerate() {
                if t > exps[j] || (i > 0 && t < steps[i - 1][j]) {
                    return Err(Error::Precondition("filtration is not a decreasing chain".into()));
                }
                if i == 0 && t != 0 {
                    return Err(Error::Precondition("G_0 must be the whole group".into()));
                }
            }
        }
        let mut offsets = Vec::with_capacity(exps.len());
        let mut o = 0u8;
        for &r in &exps {
            offsets.push(o);
            o += r;
        }
        let all_binary = exps.iter().all(|&r| r == 1);
        Ok(FilteredGroup {
            exps,
            offsets,
            steps,
            all_binary,
        })
    }

    /// `D^d` on a product of cyclic groups: `G_i = G` for `i <= d`, else 0.
    pub fn lower(exps: Vec<u8>, d: usize) -> Self {
        let k = exps.len();
        Self::new(exps, vec![vec![0; k]; d + 1]).expect("valid D^d filtration")
    }

    /// `D^d(F_2^n)`.
    pub fn f2(n: usize, d: usize) -> Self {
        Self::lower(vec![1; n], d)
    }

    /// `D^d((1/2^r)Z/Z)`, identified with `Z/2^r` by numerators.
    pub fn torus(r: u8, d: usize) -> Self {
        Self::lower(vec![r], d)
    }

    /// The one-point space.
    pub fn point() -> Self {
        Self::new(vec![], vec![vec![]]).unwrap()
    }

    pub fn exps(&self) -> &[u8] {
        &self.exps
    }

    pub fn bits(&self) -> u32 {
        self.exps.iter().map(|&r| r as u32).sum()
    }

    pub fn order(&self) -> u64 {
        1u64 << self.bits()
    }

    /// Largest `i` with `G_i` possibly nonzero.
    pub fn degree(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_ergodic(&self) -> bool {
        self.steps.len() < 2 || self.steps[1].iter().all(|&t| t == 0)
            || self.exps.is_empty()
    }

    #[inline]
    fn field(&self, x: u64, j: usize) -> u64 {
        (x >> self.offsets[j]) & ((1u64 << self.exps[j]) - 1)
    }

    #[inline]
    fn map_fields(&self, a: u64, b: u64, f: impl Fn(u64, u64) -> u64) -> u64 {
        let mut out = 0;
        for j in 0..self.exps.len() {
            let m = (1u64 << self.exps[j]) - 1;
            out |= (f(self.field(a, j), self.field(b, j)) & m) << self.offsets[j];
        }
        out
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.all_binary {
            a ^ b
        } else {
            self.map_fields(a, b, u64::wrapping_add)
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if self.all_binary {
            a ^ b
        } else {
            self.map_fields(a, b, u64::wrapping_sub)
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    pub fn scale(&self, a: u64, k: i64) -> u64 {
        self.map_fields(a, 0, |x, _| (x as i128 * k as i128).rem_euclid(1 << 62) as u64)
    }

    /// Membership in `G_i`.
    pub fn in_level(&self, x: u64, i: usize) -> bool {
        match self.steps.get(i) {
            None => x == 0,
            Some(row) => (0..self.exps.len()).all(|j| self.field(x, j) & ((1u64 << row[j]) - 1) == 0),
        }
    }

    /// Generators of `G_i`, one per factor not killed at that level.
    pub fn level_generators(&self, i: usize) -> Vec<u64> {
        match self.steps.get(i) {
            None => vec![],
            Some(row) => (0..self.exps.len())
                .filter(|&j| row[j] < self.exps[j])
                .map(|j| 1u64 << (self.offsets[j] + row[j]))
                .collect(),
        }
    }

    /// Uniform element of `G_i`.
    pub fn random_in_level<R: rand::Rng + ?Sized>(&self, i: usize, rng: &mut R) -> u64 {
        let Some(row) = self.steps.get(i) else { return 0 };
        let mut x = 0;
        for j in 0..self.exps.len() {
            let free = self.exps[j] - row[j];
            if free > 0 {
                let v = rng.gen::<u64>() & ((1u64 << free) - 1);
                x |= (v << row[j]) << self.offsets[j];
            }
        }
        x
    }

    /// Host-Kra parameters of a tuple (Mobius transform in the group).
    pub fn params(&self, t: &[u64]) -> Vec<u64> {
        let mut h = t.to_vec();
        let m = h.len().trailing_zeros();
        for i in 0..m {
            let b = 1usize << i;
            for w in 0..h.len() {
                if w & b != 0 {
                    h[w] = self.sub(h[w], h[w ^ b]);
                }
            }
        }
        h
    }

    /// Inverse of [`FilteredGroup::params`].
    pub fn tuple(&self, h: &[u64]) -> Vec<u64> {
        let mut t = h.to_vec();
        let m = t.len().trailing_zeros();
        for i in 0..m {
            let b = 1usize << i;
            for w in 0..t.len() {
                if w & b != 0 {
                    t[w] = self.add(t[w], t[w ^ b]);
                }
            }
        }
        t
    }

    /// The Host-Kra group `G^[d]` written in parameter coordinates:
    /// factor `(a, j)` is `G_{|a|}` in factor `j`, and level `i` of the new
    /// filtration is `prod_a G_{|a|+i}`.
    pub fn host_kra(&self, d: usize) -> FilteredGroup {
        let t = |w: usize, j: usize| -> u8 {
            self.steps.get(w).map(|row| row[j]).unwrap_or(self.exps[j])
        };
        let mut exps = Vec::new();
        let mut cols = Vec::new();
        for a in 0..1usize << d {
            let w = a.count_ones() as usize;
            for j in 0..self.exps.len() {
                exps.push(self.exps[j] - t(w, j));
                cols.push((w, j));
            }
        }
        let deg = self.degree();
        let steps = (0..=deg)
            .map(|i| cols.iter().map(|&(w, j)| t(w + i, j) - t(w, j)).collect())
            .collect();
        FilteredGroup::new(exps, steps).expect("Host-Kra filtration")
    }

    /// Packs Host-Kra parameters of a d-cube into a `host_kra(d)` element.
    pub fn pack_params(&self, d: usize, h: &[u64]) -> u64 {
        let mut out = 0u64;
        let mut off = 0u32;
        for (a, &ha) in h.iter().enumerate().take(1 << d) {
            let w = a.count_ones() as usize;
            for j in 0..self.exps.len() {
                let t = self.steps.get(w).map(|row| row[j]).unwrap_or(self.exps[j]);
                let width = (self.exps[j] - t) as u32;
                out |= (self.field(ha, j) >> t) << off;
                off += width;
            }
        }
        out
    }

    /// Inverse of [`FilteredGroup::pack_params`].
    pub fn unpack_params(&self, d: usize, mut x: u64) -> Vec<u64> {
        (0..1usize << d)
            .map(|a| {
                let w = a.count_ones() as usize;
                let mut ha = 0u64;
                for j in 0..self.exps.len() {
                    let t = self.steps.get(w).map(|row| row[j]).unwrap_or(self.exps[j]);
                    let width = self.exps[j] - t;
                    ha |= ((x & ((1u64 << width) - 1)) << t) << self.offsets[j];
                    x >>= width;
                }
                ha
            })
            .collect()
    }
}

impl CubeSpace for FilteredGroup {
    type Point = u64;
    fn is_cube(&self, t: &[u64]) -> bool {
        hk_cube_check(self, t).is_some()
    }
}

/// Returns the Host-Kra parameters when `t` is a cube.
pub fn hk_cube_check(g: &FilteredGroup, t: &[u64]) -> Option<HkParam> {
    assert!(t.len().is_power_of_two());
    let h = g.params(t);
    h.iter()
        .enumerate()
        .all(|(a, &x)| g.in_level(x, a.count_ones() as usize))
        .then(|| HkParam {
            m: t.len().trailing_zeros() as usize,
            h,
        })
}

/// Fills vertex `1^m` of a tuple whose faces through `0^m` are cubes, taking
/// the top parameter to be 0. The value at index `2^m - 1` is ignored.
pub fn corner_complete(g: &FilteredGroup, partial: &[u64]) -> Result<Vec<u64>> {
    if !partial.len().is_power_of_two() || partial.len() < 2 {
        return Err(Error::Dimension("corner needs 2^m entries with m >= 1".into()));
    }
    let top = partial.len() - 1;
    let mut t = partial.to_vec();
    t[top] = 0;
    let mut h = g.params(&t);
    for (a, &x) in h.iter().enumerate().take(top) {
        if !g.in_level(x, a.count_ones() as usize) {
            return Err(Error::Precondition(
                "a lower face of the corner is not a cube".into(),
            ));
        }
    }
    h[top] = 0;
    Ok(g.tuple(&h))
}

/// Checks that `f: G -> H` is a filtered morphism using derivatives along
/// level generators, with total weight up to `deg H + 1`.
pub fn morphism_check(g: &FilteredGroup, h: &FilteredGroup, f: &dyn Fn(u64) -> u64) -> Result<bool> {
    if g.bits() > 24 {
        return Err(Error::Budget(format!("source group of order 2^{}", g.bits())));
    }
    let table: Vec<u64> = (0..g.order()).map(f).collect();
    let mut dirs: Vec<(usize, u64)> = Vec::new();
    for i in 1..=g.degree() {
        for gen in g.level_generators(i) {
            dirs.push((i, gen));
        }
    }
    let cap = h.degree() + 1;
    fn rec(
        g: &FilteredGroup,
        h: &FilteredGroup,
        t: &[u64],
        dirs: &[(usize, u64)],
        start: usize,
        weight: usize,
        cap: usize,
    ) -> bool {
        if !t.iter().all(|&v| h.in_level(v, weight)) {
            return false;
        }
        if weight >= cap || t.iter().all(|&v| v == 0) {
            return true;
        }
        (start..dirs.len()).all(|k| {
            let (w, d) = dirs[k];
            let next: Vec<u64> = (0..t.len() as u64)
                .map(|x| h.sub(t[g.add(x, d) as usize], t[x as usize]))
                .collect();
            rec(g, h, &next, dirs, k, weight + w, cap)
        })
    }
    Ok(rec(g, h, &table, &dirs, 0, 0, cap))
}

/// Whether `2 G_i <= G_{i+1}` for every `i >= 1`.
pub fn phom_check(g: &FilteredGroup) -> Result<bool> {
    if !g.is_ergodic() {
        return Err(Error::Precondition("filtration is not ergodic".into()));
    }
    let t = |i: usize, j: usize| g.steps.get(i).map(|r| r[j]).unwrap_or(g.exps[j]);
    Ok((1..=g.degree()).all(|i| {
        (0..g.exps.len()).all(|j| (t(i, j) + 1).min(g.exps[j]) >= t(i + 1, j))
    }))
}

/// All maps `{0,1}^src -> {0,1}^dst` extending to affine maps of cubes; each
/// output coordinate is 0, 1, `w_j` or `1 - w_j`.
pub fn discrete_cube_morphisms(src: usize, dst: usize) -> Vec<Vec<u32>> {
    let choices = 2 + 2 * src;
    let total = choices.pow(dst as u32);
    (0..total)
        .map(|mut code| {
            let mut coords = Vec::with_capacity(dst);
            for _ in 0..dst {
                coords.push(code % choices);
                code /= choices;
            }
            (0..1u32 << src)
                .map(|w| {
                    coords.iter().enumerate().fold(0u32, |acc, (i, &c)| {
                        let bit = match c {
                            0 => 0,
                            1 => 1,
                            c => {
                                let j = (c - 2) / 2;
                                (w >> j & 1) ^ ((c - 2) % 2) as u32
                            }
                        };
                        acc | bit << i
                    })
                })
                .collect()
        })
        .collect()
}
