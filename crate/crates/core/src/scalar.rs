//! Gaussian rationals Q(i): the ground field for every coefficient.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{fmt_rational, parse_rational, rational_abs, Field};

/// `re + im·i` with both parts stored as reduced big fractions.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        GaussianRational {
            re: BigRational::new(n.into(), d.into()),
            im: BigRational::zero(),
        }
    }

    pub fn complex(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = rhs.norm_sqr();
        let num = self.clone() * rhs.conj();
        Ok(GaussianRational {
            re: num.re / &n,
            im: num.im / n,
        })
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

/// `α = α₀ + m` with `0 <= Re α₀ < 1` and `m ∈ Z`.
pub fn normalize_alpha<F: Field>(alpha: &F) -> (F, BigInt) {
    alpha.split_integer_shift()
}

impl Field for GaussianRational {
    fn from_bigint(n: BigInt) -> Self {
        GaussianRational {
            re: BigRational::from_integer(n),
            im: BigRational::zero(),
        }
    }

    fn parse_text(s: &str) -> Option<Self> {
        s.parse().ok()
    }

    fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.denom().is_one()
    }

    fn floor_re(&self) -> BigInt {
        self.re.floor().to_integer()
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_i64(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational {
                re: &self.re * &rhs.re,
                im: BigRational::zero(),
            };
        }
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for GaussianRational {
    type Output = Self;
    /// Panics on a zero divisor; use [`GaussianRational::checked_div`] for
    /// a recoverable error.
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by zero in Q(i)")
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign for GaussianRational {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl SubAssign for GaussianRational {
    fn sub_assign(&mut self, rhs: Self) {
        self.re -= rhs.re;
        self.im -= rhs.im;
    }
}

impl MulAssign for GaussianRational {
    fn mul_assign(&mut self, rhs: Self) {
        *self = &*self * &rhs;
    }
}

impl Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl Product for GaussianRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| a * b)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &BigRational| -> String {
            if im.is_one() {
                "i".to_string()
            } else {
                format!("{}*i", fmt_rational(im))
            }
        };
        if self.im.is_zero() {
            return f.write_str(&fmt_rational(&self.re));
        }
        if self.re.is_zero() {
            if self.im.is_negative() {
                return write!(f, "-{}", im_part(&rational_abs(&self.im)));
            }
            return f.write_str(&im_part(&self.im));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}",
            fmt_rational(&self.re),
            sign,
            im_part(&rational_abs(&self.im))
        )
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `a/b`, `a/b+c/d*i`, `a/b-c/d*i`, `i`, `-i`, `c/d*i`, `3i`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a Gaussian rational: {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad());
        }
        // Split into at most two signed terms at a +/- that is not leading.
        let bytes = t.as_bytes();
        let mut cut = None;
        for (pos, &c) in bytes.iter().enumerate().skip(1) {
            if c == b'+' || c == b'-' {
                cut = Some(pos);
            }
        }
        let terms: Vec<&str> = match cut {
            Some(pos) => vec![&t[..pos], &t[pos..]],
            None => vec![&t[..]],
        };
        let mut out = GaussianRational::zero();
        let mut seen_re = false;
        let mut seen_im = false;
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            if let Some(coef) = body.strip_suffix('i') {
                if seen_im {
                    return Err(bad());
                }
                seen_im = true;
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let mut v = if coef.is_empty() {
                    BigRational::one()
                } else {
                    parse_rational(coef).ok_or_else(bad)?
                };
                if neg {
                    v = -v;
                }
                out.im = v;
            } else {
                if seen_re {
                    return Err(bad());
                }
                seen_re = true;
                let mut v = parse_rational(body).ok_or_else(bad)?;
                if neg {
                    v = -v;
                }
                out.re = v;
            }
        }
        Ok(out)
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> GaussianRational {
        x.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(s("1/2+i") + s("1/2-i"), s("1"));
        assert_eq!(s("1/3") * s("3"), GaussianRational::one());
        assert_eq!(GaussianRational::i() * GaussianRational::i(), s("-1"));
        assert_eq!(s("1+i").checked_div(&s("1-i")).unwrap(), s("i"));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(
            s("1").checked_div(&GaussianRational::zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn integrality() {
        assert!(s("5").is_integer());
        assert!(s("10/2").is_integer());
        assert!(!s("1/2").is_integer());
        assert!(!s("i").is_integer());
        assert!(!s("3+i").is_integer());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_alpha(&s("7/3")), (s("1/3"), BigInt::from(2)));
        assert_eq!(normalize_alpha(&s("0")), (s("0"), BigInt::from(0)));
        assert_eq!(
            normalize_alpha(&s("-1/2+i")),
            (s("1/2+i"), BigInt::from(-1))
        );
        let (a0, _) = normalize_alpha(&s("-17/5-2*i"));
        assert_eq!(normalize_alpha(&a0), (a0, BigInt::from(0)));
    }

    #[test]
    fn text_form() {
        for (txt, canon) in [
            ("3", "3"),
            ("-2/4", "-1/2"),
            ("i", "i"),
            ("-i", "-i"),
            ("3i", "3*i"),
            ("1/2*i", "1/2*i"),
            ("-1/2 + 3/4*i", "-1/2+3/4*i"),
            ("2-i", "2-i"),
            ("+5", "5"),
        ] {
            assert_eq!(s(txt).to_string(), canon, "{txt}");
            assert_eq!(s(canon), s(txt));
        }
        for bad in ["", "1/0", "abc", "1+2", "i+i", "1/2/3"] {
            assert!(bad.parse::<GaussianRational>().is_err(), "{bad}");
        }
    }
}
