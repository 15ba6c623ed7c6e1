//! Points of F_2^n packed into a `u32`: coordinate `x_i` is bit `i - 1`.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct BitVector {
    pub n: usize,
    pub bits: u32,
}

impl BitVector {
    pub fn new(n: usize, bits: u32) -> Self {
        debug_assert!(n <= 32 && (n == 32 || bits >> n == 0));
        BitVector { n, bits }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bitstring(self.bits, self.n))
    }
}

/// `x_1 x_2 ... x_n` as a 0/1 string.
pub fn bitstring(x: u32, n: usize) -> String {
    (0..n)
        .map(|i| if x >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Result<(u32, usize)> {
    let s = s.trim();
    if s.len() > 32 {
        return Err(Error::Parse(format!("bitstring too long: {s:?}")));
    }
    let mut x = 0u32;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => x |= 1 << i,
            _ => return Err(Error::Parse(format!("bad bitstring {s:?}"))),
        }
    }
    Ok((x, s.len()))
}

#[inline]
pub fn weight(x: u32) -> u32 {
    x.count_ones()
}

/// All subsets of `set`, in increasing numeric order.
pub fn subsets(set: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set {
            None
        } else {
            Some((cur.wrapping_sub(set)) & set)
        };
        Some(cur)
    })
}

/// Masks in `0..2^n` of weight at most `k`, in increasing order.
pub fn masks_up_to_weight(n: usize, k: usize) -> Vec<u32> {
    (0..1u32 << n).filter(|m| m.count_ones() as usize <= k).collect()
}

/// Sorted 1-based index list of a monomial mask.
pub fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// In-place subset-sum transform over `Z/2^level`.
pub(crate) fn zeta(a: &mut [u64], n: usize, m: u64) {
    for i in 0..n {
        let b = 1usize << i;
        for x in 0..a.len() {
            if x & b != 0 {
                a[x] = a[x].wrapping_add(a[x ^ b]) & m;
            }
        }
    }
}

/// Inverse of [`zeta`].
pub(crate) fn mobius(a: &mut [u64], n: usize, m: u64) {
    for i in 0..n {
        let b = 1usize << i;
        for x in 0..a.len() {
            if x & b != 0 {
                a[x] = a[x].wrapping_sub(a[x ^ b]) & m;
            }
        }
    }
}
