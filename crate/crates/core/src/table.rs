//! Dense value tables of functions F_2^n -> Z[1/2]/Z.

use std::fmt::Write as _;

use crate::bits::{bitstring, parse_bitstring, MAX_DIM};
use crate::dyadic::{mask, DyadicTorus, MAX_LEVEL};
use crate::error::{Error, Result};

/// Anything that can be evaluated pointwise on F_2^n.
pub trait Phase {
    fn dim(&self) -> usize;
    fn eval(&self, x: u32) -> DyadicTorus;
}

/// Values stored as numerators over a common `2^level`; `level` is kept minimal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FuncTable {
    n: usize,
    level: u8,
    nums: Vec<u64>,
}

impl FuncTable {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} too large for a dense table");
        FuncTable {
            n,
            level: 0,
            nums: vec![0; 1 << n],
        }
    }

    /// Builds from numerators at `level`, reducing and canonicalizing.
    pub fn from_nums(n: usize, level: u8, mut nums: Vec<u64>) -> Result<Self> {
        if nums.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "table of length {} is not 2^{n}",
                nums.len()
            )));
        }
        if level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level as u32));
        }
        let m = mask(level);
        for v in nums.iter_mut() {
            *v &= m;
        }
        let mut t = FuncTable { n, level, nums };
        t.canonicalize();
        Ok(t)
    }

    pub fn from_fn(n: usize, f: impl Fn(u32) -> DyadicTorus) -> Self {
        let vals: Vec<DyadicTorus> = (0..1u32 << n).map(f).collect();
        Self::from_values(n, &vals)
    }

    pub fn from_values(n: usize, vals: &[DyadicTorus]) -> Self {
        assert_eq!(vals.len(), 1 << n);
        let level = vals.iter().map(|v| v.level()).max().unwrap_or(0);
        FuncTable {
            n,
            level,
            nums: vals.iter().map(|v| v.numerator_at(level)).collect(),
        }
    }

    pub fn from_phase<P: Phase + ?Sized>(p: &P) -> Self {
        Self::from_fn(p.dim(), |x| p.eval(x))
    }

    fn canonicalize(&mut self) {
        let or = self.nums.iter().fold(0u64, |a, &b| a | b);
        let shift = if or == 0 {
            self.level
        } else {
            (or.trailing_zeros() as u8).min(self.level)
        };
        if shift > 0 {
            for v in self.nums.iter_mut() {
                *v >>= shift;
            }
            self.level -= shift;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    #[inline]
    pub fn get(&self, x: u32) -> DyadicTorus {
        DyadicTorus::from_raw(self.nums[x as usize], self.level)
    }

    /// Numerators at the table's own level.
    pub fn nums(&self) -> &[u64] {
        &self.nums
    }

    /// Numerators re-expressed over `2^level` (which must be >= the table level).
    pub fn nums_at(&self, level: u8) -> Vec<u64> {
        assert!(level >= self.level);
        let s = level - self.level;
        self.nums.iter().map(|&v| v << s).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.level == 0
    }

    pub fn values(&self) -> Vec<DyadicTorus> {
        (0..self.nums.len() as u32).map(|x| self.get(x)).collect()
    }

    fn zip(&self, other: &FuncTable, f: impl Fn(u64, u64) -> u64) -> FuncTable {
        assert_eq!(self.n, other.n, "table dimensions differ");
        let l = self.level.max(other.level);
        let (sa, sb) = (l - self.level, l - other.level);
        let m = mask(l);
        let nums = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(&a, &b)| f(a << sa, b << sb) & m)
            .collect();
        let mut t = FuncTable {
            n: self.n,
            level: l,
            nums,
        };
        t.canonicalize();
        t
    }

    pub fn add(&self, other: &FuncTable) -> FuncTable {
        self.zip(other, u64::wrapping_add)
    }

    pub fn sub(&self, other: &FuncTable) -> FuncTable {
        self.zip(other, u64::wrapping_sub)
    }

    pub fn neg(&self) -> FuncTable {
        let m = mask(self.level);
        FuncTable {
            n: self.n,
            level: self.level,
            nums: self.nums.iter().map(|v| v.wrapping_neg() & m).collect(),
        }
    }

    pub fn add_const(&self, c: DyadicTorus) -> FuncTable {
        self.add(&FuncTable::from_fn(self.n, |_| c))
    }

    pub fn scale(&self, k: i64) -> FuncTable {
        let m = mask(self.level);
        let nums = self
            .nums
            .iter()
            .map(|&v| (v as i128 * k as i128).rem_euclid(m as i128 + 1) as u64)
            .collect();
        let mut t = FuncTable {
            n: self.n,
            level: self.level,
            nums,
        };
        t.canonicalize();
        t
    }

    /// `x -> f(x + h)`.
    pub fn shift(&self, h: u32) -> FuncTable {
        FuncTable {
            n: self.n,
            level: self.level,
            nums: (0..self.nums.len())
                .map(|x| self.nums[x ^ h as usize])
                .collect(),
        }
    }

    /// `x -> f(x + h) - f(x)`.
    pub fn derivative(&self, h: u32) -> FuncTable {
        let m = mask(self.level);
        let nums = (0..self.nums.len())
            .map(|x| self.nums[x ^ h as usize].wrapping_sub(self.nums[x]) & m)
            .collect();
        let mut t = FuncTable {
            n: self.n,
            level: self.level,
            nums,
        };
        t.canonicalize();
        t
    }

    /// Restriction along `a -> f(embed(a))` for a in F_2^m.
    pub fn pullback(&self, m: usize, embed: impl Fn(u32) -> u32) -> FuncTable {
        let nums = (0..1u32 << m)
            .map(|a| self.nums[embed(a) as usize])
            .collect();
        let mut t = FuncTable {
            n: m,
            level: self.level,
            nums,
        };
        t.canonicalize();
        t
    }

    /// CSV rows `bitstring,num,level`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,num,level\n");
        for x in 0..self.nums.len() as u32 {
            let v = self.get(x);
            writeln!(s, "{},{},{}", bitstring(x, self.n), v.num(), v.level()).unwrap();
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<FuncTable> {
        let mut rows: Vec<(u32, DyadicTorus)> = Vec::new();
        let mut n = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 fields", lineno + 1)));
            }
            let (x, len) = parse_bitstring(parts[0])?;
            if *n.get_or_insert(len) != len {
                return Err(Error::Parse(format!("line {}: inconsistent dimension", lineno + 1)));
            }
            let num: i128 = parts[1]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad numerator", lineno + 1)))?;
            let level: u8 = parts[2]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad level", lineno + 1)))?;
            rows.push((x, DyadicTorus::new(num, level)?));
        }
        let n = n.ok_or_else(|| Error::Parse("empty table".into()))?;
        if n > MAX_DIM || rows.len() != 1 << n {
            return Err(Error::Parse(format!("expected {} rows", 1u64 << n)));
        }
        let mut vals = vec![None; 1 << n];
        for (x, v) in rows {
            if vals[x as usize].replace(v).is_some() {
                return Err(Error::Parse(format!("duplicate row {}", bitstring(x, n))));
            }
        }
        let vals: Vec<DyadicTorus> = vals.into_iter().map(Option::unwrap).collect();
        Ok(FuncTable::from_values(n, &vals))
    }
}

impl Phase for FuncTable {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: u32) -> DyadicTorus {
        self.get(x)
    }
}
