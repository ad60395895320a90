//! Exact integer 2×2 and 3×3 unimodular matrices and their integer gauges.
//!
//! All arithmetic is checked: any overflow of the 64-bit guard bound is a
//! hard error, never a silent wraparound. Values are immutable and freely
//! shareable across threads.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Construction-time bound on the absolute value of any entry.
///
/// Desk-scale experiments keep entries ≤ 10⁶ and traces reduced mod q³
/// stay ≤ 10¹⁵, so 64-bit integers with checked arithmetic are enough;
/// the guard keeps intermediate cofactor products well inside `i64`.
pub const ENTRY_GUARD: i64 = 2_000_000_000;

#[inline]
fn cadd(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

#[inline]
fn csub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

#[inline]
fn cmul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// Exact integer square matrix of dimension 2 or 3, stored row-major.
///
/// A 2×2 matrix uses the first four slots of the backing array; the unused
/// tail stays zero so derived equality/ordering behave per-dimension.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat {
    dim: u8,
    e: [i64; 9],
}

impl IntMat {
    /// 2×2 matrix from row-major entries.
    pub fn new2(entries: [i64; 4]) -> Result<Self> {
        let mut e = [0i64; 9];
        e[..4].copy_from_slice(&entries);
        Self::guarded(2, e)
    }

    /// 3×3 matrix from row-major entries.
    pub fn new3(entries: [i64; 9]) -> Result<Self> {
        Self::guarded(3, entries)
    }

    /// 3×3 matrix from rows.
    pub fn from_rows3(r1: [i64; 3], r2: [i64; 3], r3: [i64; 3]) -> Result<Self> {
        Self::new3([
            r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2],
        ])
    }

    fn guarded(dim: u8, e: [i64; 9]) -> Result<Self> {
        for &v in &e[..(dim as usize * dim as usize)] {
            if v.abs() > ENTRY_GUARD {
                return Err(Error::GuardBound(v));
            }
        }
        Ok(IntMat { dim, e })
    }

    /// Internal constructor for the enumeration hot path, where entries are
    /// already bounded by the ball radius.
    #[inline]
    pub(crate) fn from_rows3_unchecked(r1: [i64; 3], r2: [i64; 3], r3: [i64; 3]) -> Self {
        IntMat {
            dim: 3,
            e: [
                r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2],
            ],
        }
    }

    pub fn identity(dim: u8) -> Self {
        let mut e = [0i64; 9];
        match dim {
            2 => {
                e[0] = 1;
                e[3] = 1;
            }
            3 => {
                e[0] = 1;
                e[4] = 1;
                e[8] = 1;
            }
            _ => panic!("dimension must be 2 or 3"),
        }
        IntMat { dim, e }
    }

    #[inline]
    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// Row-major entries (length dim²).
    #[inline]
    pub fn entries(&self) -> &[i64] {
        &self.e[..(self.dim as usize * self.dim as usize)]
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.e[i * self.dim as usize + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> [i64; 3] {
        debug_assert_eq!(self.dim, 3);
        [self.e[3 * i], self.e[3 * i + 1], self.e[3 * i + 2]]
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMat::identity(self.dim)
    }

    /// Exact determinant by cofactor expansion.
    pub fn det(&self) -> Result<i64> {
        match self.dim {
            2 => csub(cmul(self.e[0], self.e[3])?, cmul(self.e[1], self.e[2])?),
            3 => {
                let m = &self.e;
                let c0 = csub(cmul(m[4], m[8])?, cmul(m[5], m[7])?)?;
                let c1 = csub(cmul(m[3], m[8])?, cmul(m[5], m[6])?)?;
                let c2 = csub(cmul(m[3], m[7])?, cmul(m[4], m[6])?)?;
                cadd(csub(cmul(m[0], c0)?, cmul(m[1], c1)?)?, cmul(m[2], c2)?)
            }
            _ => unreachable!(),
        }
    }

    pub fn trace(&self) -> Result<i64> {
        match self.dim {
            2 => cadd(self.e[0], self.e[3]),
            3 => cadd(cadd(self.e[0], self.e[4])?, self.e[8]),
            _ => unreachable!(),
        }
    }

    pub fn mul(&self, other: &IntMat) -> Result<IntMat> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let n = self.dim as usize;
        let mut e = [0i64; 9];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i64;
                for k in 0..n {
                    acc = cadd(acc, cmul(self.e[i * n + k], other.e[k * n + j])?)?;
                }
                e[i * n + j] = acc;
            }
        }
        IntMat::guarded(self.dim, e)
    }

    /// Exact integer inverse via the adjugate; requires det = 1.
    pub fn inverse_unimodular(&self) -> Result<IntMat> {
        let d = self.det()?;
        if d != 1 {
            return Err(Error::NotUnimodular(d));
        }
        match self.dim {
            2 => IntMat::new2([self.e[3], -self.e[1], -self.e[2], self.e[0]]),
            3 => {
                let m = &self.e;
                let mut a = [0i64; 9];
                // adjugate: a[j][i] = cofactor(i, j)
                a[0] = csub(cmul(m[4], m[8])?, cmul(m[5], m[7])?)?;
                a[3] = csub(cmul(m[5], m[6])?, cmul(m[3], m[8])?)?;
                a[6] = csub(cmul(m[3], m[7])?, cmul(m[4], m[6])?)?;
                a[1] = csub(cmul(m[2], m[7])?, cmul(m[1], m[8])?)?;
                a[4] = csub(cmul(m[0], m[8])?, cmul(m[2], m[6])?)?;
                a[7] = csub(cmul(m[1], m[6])?, cmul(m[0], m[7])?)?;
                a[2] = csub(cmul(m[1], m[5])?, cmul(m[2], m[4])?)?;
                a[5] = csub(cmul(m[2], m[3])?, cmul(m[0], m[5])?)?;
                a[8] = csub(cmul(m[0], m[4])?, cmul(m[1], m[3])?)?;
                IntMat::guarded(3, a)
            }
            _ => unreachable!(),
        }
    }

    /// Largest absolute entry. Positive for any unimodular matrix.
    pub fn norm_inf(&self) -> i64 {
        self.entries().iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Integer gauges (‖γ‖∞, ‖γ⁻¹‖∞ and their product).
    pub fn gauges(&self) -> Result<IntGauge> {
        let inv = self.inverse_unimodular()?;
        let norm_inf = self.norm_inf();
        let norm_inf_inverse = inv.norm_inf();
        let delta = cmul(norm_inf, norm_inf_inverse)?;
        Ok(IntGauge {
            norm_inf,
            norm_inf_inverse,
            delta,
        })
    }

    pub fn transpose(&self) -> IntMat {
        let n = self.dim as usize;
        let mut e = [0i64; 9];
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.e[i * n + j];
            }
        }
        IntMat { dim: self.dim, e }
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMat({self})")
    }
}

/// Text literal: row-major integers, rows separated by ';', entries by
/// spaces, e.g. `1 0 1; 0 1 0; 0 0 1`.
impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim as usize;
        for i in 0..n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.e[i * n + j])?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntMat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.split(';').collect();
        let n = rows.len();
        if n != 2 && n != 3 {
            return Err(Error::Parse(format!(
                "expected 2 or 3 rows separated by ';', got {n}"
            )));
        }
        let mut e = [0i64; 9];
        for (i, row) in rows.iter().enumerate() {
            let vals: Vec<i64> = row
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad integer entry {t:?}")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != n {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    vals.len()
                )));
            }
            e[i * n..i * n + n].copy_from_slice(&vals);
        }
        IntMat::guarded(n as u8, e)
    }
}

/// Integer size gauges of a unimodular matrix.
///
/// `delta` is the product gauge ‖γ‖∞·‖γ⁻¹‖∞; the adjugate bound gives
/// `norm_inf_inverse ≤ 2·norm_inf²` and symmetrically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntGauge {
    pub norm_inf: i64,
    pub norm_inf_inverse: i64,
    pub delta: i64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3(s: &str) -> IntMat {
        s.parse().unwrap()
    }

    #[test]
    fn det_examples() {
        assert_eq!(IntMat::identity(3).det().unwrap(), 1);
        assert_eq!(m3("1 1 0; 0 1 0; 0 0 1").det().unwrap(), 1);
        assert_eq!(m3("2 1; 1 1").det().unwrap(), 1);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            IntMat::identity(3).inverse_unimodular().unwrap(),
            IntMat::identity(3)
        );
        assert_eq!(
            m3("1 0 1; 0 1 0; 0 0 1").inverse_unimodular().unwrap(),
            m3("1 0 -1; 0 1 0; 0 0 1")
        );
        assert_eq!(
            m3("2 1; 1 1").inverse_unimodular().unwrap(),
            m3("1 -1; -1 2")
        );
    }

    #[test]
    fn inverse_requires_det_one() {
        let m = m3("2 0; 0 1");
        assert!(matches!(
            m.inverse_unimodular(),
            Err(Error::NotUnimodular(2))
        ));
    }

    #[test]
    fn gauge_examples() {
        let g = IntMat::identity(3).gauges().unwrap();
        assert_eq!((g.norm_inf, g.norm_inf_inverse, g.delta), (1, 1, 1));
        let g = m3("2 1; 1 1").gauges().unwrap();
        assert_eq!((g.norm_inf, g.norm_inf_inverse, g.delta), (2, 2, 4));
        let g = m3("1 0 1; 0 1 0; 0 0 1").gauges().unwrap();
        assert_eq!((g.norm_inf, g.norm_inf_inverse, g.delta), (1, 1, 1));
    }

    #[test]
    fn trace_and_mul() {
        assert_eq!(IntMat::identity(3).trace().unwrap(), 3);
        let a = m3("1 1 0; 0 1 0; 0 0 1");
        let b = m3("1 0 0; 0 1 1; 0 0 1");
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, m3("1 1 1; 0 1 1; 0 0 1"));
        assert_eq!(ab.det().unwrap(), 1);
    }

    #[test]
    fn guard_bound_is_enforced() {
        assert!(IntMat::new2([ENTRY_GUARD + 1, 0, 0, 1]).is_err());
        assert!(IntMat::new2([ENTRY_GUARD, 0, 0, 1]).is_ok());
    }

    #[test]
    fn overflow_is_an_error() {
        // first cofactor is 2·GUARD², so the row expansion overflows
        let g = ENTRY_GUARD;
        let m = IntMat::new3([g, 0, 0, 0, g, g, 0, -g, g]).unwrap();
        assert!(matches!(m.det(), Err(Error::Overflow)));
    }

    #[test]
    fn parse_roundtrip() {
        let m = m3("1 0 1; 0 1 0; 0 0 1");
        assert_eq!(m.to_string().parse::<IntMat>().unwrap(), m);
        assert!("1 2; 3".parse::<IntMat>().is_err());
        assert!("1 2 3".parse::<IntMat>().is_err());
    }
}
