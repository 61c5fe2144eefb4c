//! The exact ground-field abstraction every other module is generic over.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact field of characteristic zero.
///
/// Implementations must make `==` and `is_zero` exact: the module and
/// radical computations branch on zero tests, so approximate types
/// (`f32`, `f64`) are intentionally not instances.
pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_bigint(n: BigInt) -> Self;

    /// Parses the canonical text form produced by `Display`.
    fn parse_text(s: &str) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    /// True iff the value lies in Z.
    fn is_integer(&self) -> bool;

    /// `floor(Re self)`.
    fn floor_re(&self) -> BigInt;

    /// Multiplicative inverse, `None` at zero.
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    /// Splits `self = reduced + m` with `m ∈ Z` and `0 <= Re reduced < 1`.
    fn split_integer_shift(&self) -> (Self, BigInt) {
        let m = self.floor_re();
        (self.clone() - Self::from_bigint(m.clone()), m)
    }
}

impl Field for BigRational {
    fn from_bigint(n: BigInt) -> Self {
        BigRational::from_integer(n)
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_rational(s)
    }

    fn is_integer(&self) -> bool {
        self.denom().is_one()
    }

    fn floor_re(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }
}

/// Integer-valued helper shared by the parsers.
pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_abs(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_split() {
        assert_eq!(q(7, 3).split_integer_shift(), (q(1, 3), BigInt::from(2)));
        assert_eq!(q(-1, 2).split_integer_shift(), (q(1, 2), BigInt::from(-1)));
        assert_eq!(q(0, 1).split_integer_shift(), (q(0, 1), BigInt::from(0)));
    }

    #[test]
    fn rational_integrality() {
        assert!(q(10, 2).is_integer());
        assert!(!q(1, 2).is_integer());
        assert_eq!(q(3, 1).inv(), Some(q(1, 3)));
        assert_eq!(q(0, 1).inv(), None);
    }
}
