//! Skew products `X x_rho Z` with `Z` an elementary abelian 2-group.
//!
//! Fiber values live in `u64` with addition given by XOR. A tuple
//! `(x_w, z_w)` is a cube iff `(x_w)` is a cube of X and on every
//! `(k+1)`-dimensional face the alternating sum of `z` equals `rho` of the
//! base face.

use crate::cube::CubeSpace;

pub struct SkewSpace<'a, X: CubeSpace> {
    pub base: &'a X,
    pub k: usize,
    pub rho: Box<dyn Fn(&[X::Point]) -> u64 + 'a>,
}

/// Faces of `{0,1}^m` of dimension `j`: each is the list of its `2^j`
/// vertices in the order induced by the free coordinates.
pub fn faces(m: usize, j: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if j > m {
        return out;
    }
    for free in 0u32..1 << m {
        if free.count_ones() as usize != j {
            continue;
        }
        let free_bits: Vec<u32> = (0..m as u32).filter(|i| free >> i & 1 == 1).collect();
        let fixed_mask = !free & ((1u32 << m) - 1);
        let mut fixed = 0u32;
        loop {
            let face: Vec<u32> = (0..1u32 << j)
                .map(|w| {
                    free_bits
                        .iter()
                        .enumerate()
                        .fold(fixed, |acc, (p, &b)| acc | (w >> p & 1) << b)
                })
                .collect();
            out.push(face);
            fixed = (fixed.wrapping_sub(fixed_mask)) & fixed_mask;
            if fixed == 0 {
                break;
            }
        }
    }
    out
}

impl<'a, X: CubeSpace> SkewSpace<'a, X> {
    fn face_ok(&self, t: &[(X::Point, u64)], face: &[u32]) -> bool {
        let base: Vec<X::Point> = face.iter().map(|&w| t[w as usize].0.clone()).collect();
        let z = face.iter().fold(0u64, |acc, &w| acc ^ t[w as usize].1);
        z == (self.rho)(&base)
    }

    pub fn skew_cube_check(&self, t: &[(X::Point, u64)]) -> bool {
        assert!(t.len().is_power_of_two());
        let m = t.len().trailing_zeros() as usize;
        let base: Vec<X::Point> = t.iter().map(|p| p.0.clone()).collect();
        if !self.base.is_cube(&base) {
            return false;
        }
        faces(m, self.k + 1).iter().all(|f| self.face_ok(t, f))
    }

    /// Lifts a base cube: `z = 0` below weight `k+1`, `rho` of the face
    /// spanned by `w` at weight `k+1`, then completion upward through the
    /// face on the first `k+1` coordinates of `w`.
    pub fn skew_lift(&self, base: &[X::Point]) -> Vec<(X::Point, u64)> {
        let m = base.len().trailing_zeros() as usize;
        let k1 = self.k + 1;
        let mut z = vec![0u64; base.len()];
        let mut order: Vec<u32> = (0..base.len() as u32).collect();
        order.sort_by_key(|w| (w.count_ones(), *w));
        for w in order {
            let wt = w.count_ones() as usize;
            if wt < k1 {
                continue;
            }
            let bits: Vec<u32> = (0..m as u32).filter(|i| w >> i & 1 == 1).collect();
            let free = &bits[..k1];
            let fixed = w & !free.iter().fold(0u32, |a, &b| a | 1 << b);
            let face: Vec<u32> = (0..1u32 << k1)
                .map(|u| {
                    free.iter()
                        .enumerate()
                        .fold(fixed, |acc, (p, &b)| acc | (u >> p & 1) << b)
                })
                .collect();
            let face_base: Vec<X::Point> = face.iter().map(|&v| base[v as usize].clone()).collect();
            let others = face[..face.len() - 1]
                .iter()
                .fold(0u64, |acc, &v| acc ^ z[v as usize]);
            z[w as usize] = (self.rho)(&face_base) ^ others;
        }
        base.iter().cloned().zip(z).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_counts() {
        // C(3,2) * 2 faces of dimension 2 in the 3-cube.
        assert_eq!(faces(3, 2).len(), 6);
        assert_eq!(faces(3, 3), vec![(0..8).collect::<Vec<u32>>()]);
        assert_eq!(faces(2, 1).len(), 4);
    }
}
