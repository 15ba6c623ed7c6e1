//! Exact arithmetic on the dyadic torus Z[1/2]/Z and on Z/4Z.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Largest supported level; numerators must fit in 62 bits.
pub const MAX_LEVEL: u8 = 62;

#[inline]
pub(crate) fn mask(level: u8) -> u64 {
    if level == 0 {
        0
    } else {
        (1u64 << level) - 1
    }
}

/// The element `num / 2^level` of R/Z, kept at its minimal level.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DyadicTorus {
    num: u64,
    level: u8,
}

impl DyadicTorus {
    pub const ZERO: DyadicTorus = DyadicTorus { num: 0, level: 0 };
    pub const HALF: DyadicTorus = DyadicTorus { num: 1, level: 1 };

    /// Reduces `num` mod `2^level` and canonicalizes.
    pub fn new(num: i128, level: u8) -> Result<Self, Error> {
        if level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level as u32));
        }
        let m = 1i128 << level;
        Ok(Self::from_raw(num.rem_euclid(m) as u64, level))
    }

    /// `num` must already be below `2^level` up to masking; level <= 62.
    #[inline]
    pub(crate) fn from_raw(num: u64, level: u8) -> Self {
        let mut num = num & mask(level);
        if num == 0 {
            return Self::ZERO;
        }
        let tz = num.trailing_zeros() as u8;
        num >>= tz;
        DyadicTorus {
            num,
            level: level - tz,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Numerator of this value written over `2^level`.
    #[inline]
    pub fn numerator_at(&self, level: u8) -> u64 {
        debug_assert!(level >= self.level);
        self.num << (level - self.level)
    }

    /// `self / 2`, choosing the representative `num / 2^(level+1)`.
    pub fn halve(&self) -> Result<Self, Error> {
        if self.num == 0 {
            return Ok(Self::ZERO);
        }
        if self.level >= MAX_LEVEL {
            return Err(Error::LevelOverflow(self.level as u32 + 1));
        }
        Ok(DyadicTorus {
            num: self.num,
            level: self.level + 1,
        })
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let v = (self.num as i128 * k as i128).rem_euclid(1i128 << self.level.max(1));
        Self::from_raw(v as u64, self.level)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.level as f64).exp2()
    }

    /// `exp(2 pi i a)`.
    pub fn e_phase(&self) -> Complex64 {
        match self.level {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(-1.0, 0.0),
            2 => {
                if self.num == 1 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                }
            }
            _ => Complex64::from_polar(1.0, std::f64::consts::TAU * self.to_f64()),
        }
    }
}

pub fn e_phase(a: DyadicTorus) -> Complex64 {
    a.e_phase()
}

impl Add for DyadicTorus {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let l = self.level.max(o.level);
        Self::from_raw(
            self.numerator_at(l).wrapping_add(o.numerator_at(l)),
            l,
        )
    }
}

impl Sub for DyadicTorus {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let l = self.level.max(o.level);
        Self::from_raw(
            self.numerator_at(l).wrapping_sub(o.numerator_at(l)),
            l,
        )
    }
}

impl Neg for DyadicTorus {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_raw(self.num.wrapping_neg(), self.level)
    }
}

impl AddAssign for DyadicTorus {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for DyadicTorus {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl std::iter::Sum for DyadicTorus {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for DyadicTorus {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by the real representative in [0, 1).
impl Ord for DyadicTorus {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.level.max(other.level);
        self.numerator_at(l).cmp(&other.numerator_at(l))
    }
}

impl fmt::Display for DyadicTorus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u64 << self.level)
    }
}

impl fmt::Debug for DyadicTorus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.level)
    }
}

/// Accepts `a/b` with `b` a power of two, `a/2^k`, or a bare integer.
impl FromStr for DyadicTorus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        let s = s.trim();
        let (a, b) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let num: i128 = a.parse().map_err(|_| bad())?;
        let level = match b {
            None => 0u32,
            Some(b) => {
                if let Some(k) = b.strip_prefix("2^") {
                    k.parse::<u32>().map_err(|_| bad())?
                } else {
                    let den: u128 = b.parse().map_err(|_| bad())?;
                    if den == 0 || !den.is_power_of_two() {
                        return Err(bad());
                    }
                    den.trailing_zeros()
                }
            }
        };
        if level > MAX_LEVEL as u32 {
            return Err(Error::LevelOverflow(level));
        }
        Self::new(num, level as u8)
    }
}

impl Serialize for DyadicTorus {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DyadicTorus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Element of Z/4Z.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Z4(u8);

impl Z4 {
    pub fn new(v: i64) -> Self {
        Z4(v.rem_euclid(4) as u8)
    }
    pub fn value(&self) -> u8 {
        self.0
    }
    /// The image of this value under Z/4 -> (1/4)Z/Z.
    pub fn quarter(&self) -> DyadicTorus {
        DyadicTorus::from_raw(self.0 as u64, 2)
    }
}

impl Add for Z4 {
    type Output = Z4;
    fn add(self, o: Z4) -> Z4 {
        Z4((self.0 + o.0) & 3)
    }
}

impl Sub for Z4 {
    type Output = Z4;
    fn sub(self, o: Z4) -> Z4 {
        Z4((self.0 + 4 - o.0) & 3)
    }
}

impl std::ops::Mul for Z4 {
    type Output = Z4;
    fn mul(self, o: Z4) -> Z4 {
        Z4((self.0 * o.0) & 3)
    }
}

/// `C(a, 2) mod 2` for a in Z/4: 0,0,1,1.
pub fn binom2(a: Z4) -> u8 {
    (a.0 >> 1) & 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> DyadicTorus {
        s.parse().unwrap()
    }

    #[test]
    fn half_plus_half_is_zero() {
        assert_eq!(t("1/2") + t("1/2"), DyadicTorus::ZERO);
        assert_eq!((t("1/2") + t("1/2")).to_string(), "0/1");
    }

    #[test]
    fn mixed_levels() {
        assert_eq!(t("3/8") + t("1/4"), t("5/8"));
        assert_eq!(t("3/8") - t("1/2"), t("7/8"));
        assert_eq!(-t("3/8"), t("5/8"));
        assert_eq!(t("3/2^3"), t("3/8"));
        assert_eq!(t("-1/4"), t("3/4"));
        assert_eq!(t("6/16").level(), 3);
    }

    #[test]
    fn binom2_table() {
        let v: Vec<u8> = (0..4).map(|a| binom2(Z4::new(a))).collect();
        assert_eq!(v, vec![0, 0, 1, 1]);
    }

    #[test]
    fn binom2_matches_integer_binomial() {
        for a in 0i64..64 {
            let c = a * (a - 1) / 2;
            assert_eq!(binom2(Z4::new(a)) as i64, c.rem_euclid(2));
        }
    }

    #[test]
    fn level_cap() {
        assert!(DyadicTorus::new(1, 62).is_ok());
        assert!(DyadicTorus::new(1, 63).is_err());
        assert!(DyadicTorus::new(1, 62).unwrap().halve().is_err());
        assert!("1/2^63".parse::<DyadicTorus>().is_err());
        assert!("1/3".parse::<DyadicTorus>().is_err());
    }

    #[test]
    fn phase_values() {
        let e = t("1/4").e_phase();
        assert_eq!(e, Complex64::new(0.0, 1.0));
        let e = t("1/8").e_phase();
        assert!((e.re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0/1", "1/2", "3/8", "17/32"] {
            assert_eq!(t(s).to_string(), s);
        }
    }

    #[test]
    fn mul_int_wraps() {
        assert_eq!(t("3/8").mul_int(3), t("1/8"));
        assert_eq!(t("1/2").mul_int(-1), t("1/2"));
        assert_eq!(t("1/4").mul_int(4), DyadicTorus::ZERO);
    }
}
