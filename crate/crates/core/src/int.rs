//! Unbounded integers for weights, degrees and slacks.
//!
//! Values that fit in an `i64` are kept inline and all arithmetic on them is
//! checked; on overflow the computation is redone on `BigInt`. A `Big` value
//! never holds something that would fit in an `i64`, so equality and hashing
//! are structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Int(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64),
    Big(BigInt),
}

impl Int {
    pub const ZERO: Int = Int(Repr::Small(0));
    pub const ONE: Int = Int(Repr::Small(1));

    fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int(Repr::Small(v)),
            None => Int(Repr::Big(b)),
        }
    }

    fn to_big(&self) -> BigInt {
        match &self.0 {
            Repr::Small(v) => BigInt::from(*v),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(v) => *v > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(v) => *v < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1))
    }

    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Big(_) => None,
        }
    }

    pub fn abs(&self) -> Int {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Number of bits needed for the magnitude (0 for zero).
    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(v) => 64 - u64::from(v.unsigned_abs().leading_zeros()),
            Repr::Big(b) => b.bits(),
        }
    }

    /// `⌈self / d⌉` for a positive divisor.
    pub fn div_ceil(&self, d: &Int) -> Int {
        debug_assert!(d.is_positive());
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &d.0) {
            let q = a.div_euclid(*b);
            return if a.rem_euclid(*b) == 0 {
                Int::from(q)
            } else {
                // q + 1 cannot overflow: q <= a / b < i64::MAX when b >= 1 and the
                // remainder is non-zero
                Int::from(q + 1)
            };
        }
        Int::from_big(Integer::div_ceil(&self.to_big(), &d.to_big()))
    }

    /// `⌊self / d⌋` for a positive divisor.
    pub fn div_floor(&self, d: &Int) -> Int {
        debug_assert!(d.is_positive());
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &d.0) {
            return Int::from(a.div_euclid(*b));
        }
        Int::from_big(Integer::div_floor(&self.to_big(), &d.to_big()))
    }

    /// Non-negative remainder for a positive divisor.
    pub fn rem_floor(&self, d: &Int) -> Int {
        debug_assert!(d.is_positive());
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &d.0) {
            return Int::from(a.rem_euclid(*b));
        }
        Int::from_big(Integer::mod_floor(&self.to_big(), &d.to_big()))
    }

    pub fn is_multiple_of(&self, d: &Int) -> bool {
        self.rem_floor(d).is_zero()
    }

    pub fn gcd(&self, other: &Int) -> Int {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if *a != i64::MIN && *b != i64::MIN {
                return Int::from(a.gcd(b));
            }
        }
        Int::from_big(self.to_big().gcd(&other.to_big()))
    }

    pub fn lcm(&self, other: &Int) -> Int {
        if self.is_zero() || other.is_zero() {
            return Int::ZERO;
        }
        let g = self.gcd(other);
        (&self.div_floor(&g) * other).abs()
    }

    pub fn min_ref<'a>(&'a self, other: &'a Int) -> &'a Int {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Default for Int {
    fn default() -> Self {
        Int::ZERO
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int(Repr::Small(v))
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Self {
        Int(Repr::Small(i64::from(v)))
    }
}

impl From<u32> for Int {
    fn from(v: u32) -> Self {
        Int(Repr::Small(i64::from(v)))
    }
}

impl From<usize> for Int {
    fn from(v: usize) -> Self {
        match i64::try_from(v) {
            Ok(v) => Int(Repr::Small(v)),
            Err(_) => Int::from_big(BigInt::from(v)),
        }
    }
}

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Self {
        Int::from_big(b)
    }
}

impl From<&Int> for BigInt {
    fn from(v: &Int) -> Self {
        v.to_big()
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq<i64> for Int {
    fn eq(&self, other: &i64) -> bool {
        matches!(self.0, Repr::Small(v) if v == *other)
    }
}

impl PartialOrd<i64> for Int {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(match &self.0 {
            Repr::Small(v) => v.cmp(other),
            Repr::Big(b) => {
                if b.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        })
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a Int> for &'a Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
                    if let Some(v) = a.$checked(*b) {
                        return Int(Repr::Small(v));
                    }
                }
                Int::from_big(self.to_big().$method(rhs.to_big()))
            }
        }

        impl $trait<Int> for Int {
            type Output = Int;
            fn $method(self, rhs: Int) -> Int {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a Int> for Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                (&self).$method(rhs)
            }
        }

        impl<'a> $trait<Int> for &'a Int {
            type Output = Int;
            fn $method(self, rhs: Int) -> Int {
                self.$method(&rhs)
            }
        }
    };
}

checked_binop!(Add, add, checked_add);
checked_binop!(Sub, sub, checked_sub);
checked_binop!(Mul, mul, checked_mul);

impl AddAssign<&Int> for Int {
    fn add_assign(&mut self, rhs: &Int) {
        if let (Repr::Small(a), Repr::Small(b)) = (&mut self.0, &rhs.0) {
            if let Some(v) = a.checked_add(*b) {
                *a = v;
                return;
            }
        }
        *self = &*self + rhs;
    }
}

impl SubAssign<&Int> for Int {
    fn sub_assign(&mut self, rhs: &Int) {
        if let (Repr::Small(a), Repr::Small(b)) = (&mut self.0, &rhs.0) {
            if let Some(v) = a.checked_sub(*b) {
                *a = v;
                return;
            }
        }
        *self = &*self - rhs;
    }
}

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match &self.0 {
            Repr::Small(v) => match v.checked_neg() {
                Some(n) => Int(Repr::Small(n)),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Repr::Big(b) => Int::from_big(-b.clone()),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl std::iter::Sum for Int {
    fn sum<I: Iterator<Item = Int>>(iter: I) -> Int {
        let mut acc = Int::ZERO;
        for v in iter {
            acc += &v;
        }
        acc
    }
}

impl<'a> std::iter::Sum<&'a Int> for Int {
    fn sum<I: Iterator<Item = &'a Int>>(iter: I) -> Int {
        let mut acc = Int::ZERO;
        for v in iter {
            acc += v;
        }
        acc
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid integer literal `{0}`")]
pub struct ParseIntError(pub String);

impl FromStr for Int {
    type Err = ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix('+').unwrap_or(s);
        if let Ok(v) = digits.parse::<i64>() {
            return Ok(Int::from(v));
        }
        BigInt::from_str(digits)
            .map(Int::from_big)
            .map_err(|_| ParseIntError(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: i128) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn overflow_escapes_to_big() {
        let max = Int::from(i64::MAX);
        let sum = &max + &Int::ONE;
        assert_eq!(BigInt::from(&sum), big(i64::MAX as i128 + 1));
        // and comes back down
        let back = &sum - &Int::ONE;
        assert_eq!(back, max);
        assert_eq!(back.to_i64(), Some(i64::MAX));
    }

    #[test]
    fn product_overflow() {
        let a = Int::from(1i64 << 40);
        let p = &a * &a;
        assert_eq!(BigInt::from(&p), big(1i128 << 80));
        assert_eq!(p.bits(), 81);
    }

    #[test]
    fn ceil_and_floor() {
        let seven = Int::from(7);
        assert_eq!(Int::from(4).div_ceil(&Int::from(6)), Int::ONE);
        assert_eq!(Int::from(12).div_ceil(&Int::from(6)), Int::from(2));
        assert_eq!(Int::from(-3).div_ceil(&seven), Int::ZERO);
        assert_eq!(Int::from(-8).div_floor(&seven), Int::from(-2));
        assert_eq!(Int::from(8).rem_floor(&seven), Int::ONE);
    }

    #[test]
    fn lcm_gcd() {
        assert_eq!(Int::from(4).lcm(&Int::from(6)), Int::from(12));
        assert_eq!(Int::from(5).lcm(&Int::from(3)), Int::from(15));
        assert_eq!(Int::from(12).gcd(&Int::from(18)), Int::from(6));
    }

    #[test]
    fn parse_and_display() {
        let v: Int = "+123456789012345678901234567890".parse().unwrap();
        assert_eq!(v.to_string(), "123456789012345678901234567890");
        assert_eq!("-5".parse::<Int>().unwrap(), Int::from(-5));
        assert!("x1".parse::<Int>().is_err());
    }

    proptest! {
        #[test]
        fn matches_bigint(a in any::<i64>(), b in any::<i64>(), d in 1i64..1000) {
            let (x, y) = (Int::from(a), Int::from(b));
            let (bx, by) = (big(a as i128), big(b as i128));
            prop_assert_eq!(BigInt::from(&(&x + &y)), &bx + &by);
            prop_assert_eq!(BigInt::from(&(&x - &y)), &bx - &by);
            prop_assert_eq!(BigInt::from(&(&x * &y)), &bx * &by);
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            let dd = Int::from(d);
            prop_assert_eq!(BigInt::from(&x.div_ceil(&dd)), Integer::div_ceil(&bx, &big(d as i128)));
            let mut acc = x.clone();
            acc += &y;
            acc -= &y;
            prop_assert_eq!(acc, x);
        }
    }
}
