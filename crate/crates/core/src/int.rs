//! Exact integers with an inline `i64` fast path.
//!
//! Almost every entry that shows up in the lattice computations is a small
//! machine integer, but Smith normal form reductions can blow entries up
//! without warning. `Int` keeps values inline while they fit in an `i64` and
//! transparently promotes to a heap `BigInt` on overflow.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary precision integer. Invariant: the `Big` variant never holds a
/// value that fits in an `i64`.
#[derive(Clone)]
pub enum Int {
    Small(i64),
    Big(Box<BigInt>),
}

use Int::{Big, Small};

impl Int {
    pub const ZERO: Int = Small(0);
    pub const ONE: Int = Small(1);

    pub fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Small(v),
            None => Big(Box::new(b)),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Small(v) => BigInt::from(*v),
            Big(b) => (**b).clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Small(v) => Some(*v),
            Big(_) => None,
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        matches!(self, Small(0))
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        matches!(self, Small(1))
    }

    /// True for `1` and `-1`.
    #[inline]
    pub fn is_unit(&self) -> bool {
        matches!(self, Small(1) | Small(-1))
    }

    pub fn signum(&self) -> i32 {
        match self {
            Small(v) => v.signum() as i32,
            Big(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Int {
        match self {
            Small(v) => match v.checked_abs() {
                Some(a) => Small(a),
                None => Int::from_big(BigInt::from(*v).abs()),
            },
            Big(b) => Int::from_big(b.abs()),
        }
    }

    /// Compare absolute values without allocating in the common case.
    pub fn cmp_abs(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Small(a), Small(b)) => a.unsigned_abs().cmp(&b.unsigned_abs()),
            _ => self.to_big().abs().cmp(&other.to_big().abs()),
        }
    }

    /// Floor division.
    pub fn div_floor(&self, other: &Int) -> Int {
        assert!(!other.is_zero(), "division by zero");
        match (self, other) {
            (Small(a), Small(b)) if !(*a == i64::MIN && *b == -1) => Small(a.div_floor(b)),
            _ => Int::from_big(self.to_big().div_floor(&other.to_big())),
        }
    }

    /// Floor modulus, result has the sign of `other`.
    pub fn mod_floor(&self, other: &Int) -> Int {
        assert!(!other.is_zero(), "division by zero");
        match (self, other) {
            (Small(a), Small(b)) if !(*a == i64::MIN && *b == -1) => Small(a.mod_floor(b)),
            _ => Int::from_big(self.to_big().mod_floor(&other.to_big())),
        }
    }

    /// Quotient rounded to the nearest integer (ties toward floor). Used as
    /// the reduction step in normal form algorithms; keeps remainders in
    /// `(-|b|/2, |b|/2]`.
    pub fn div_round(&self, other: &Int) -> Int {
        let q = self.div_floor(other);
        let r = self - &(&q * other);
        // r has the sign of other (or is zero); round up when 2|r| > |b|
        let twice = &r + &r;
        if twice.cmp_abs(other) == Ordering::Greater {
            q + Int::ONE
        } else {
            q
        }
    }

    pub fn divides(&self, other: &Int) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.mod_floor(self).is_zero()
    }

    /// Exact division; panics when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Int) -> Int {
        let q = self.div_floor(other);
        debug_assert!((&q * other) == *self, "inexact division");
        q
    }

    pub fn gcd(&self, other: &Int) -> Int {
        match (self, other) {
            (Small(a), Small(b)) => {
                let g = a.unsigned_abs().gcd(&b.unsigned_abs());
                match i64::try_from(g) {
                    Ok(v) => Small(v),
                    Err(_) => Int::from_big(BigInt::from(g)),
                }
            }
            _ => Int::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    pub fn lcm(&self, other: &Int) -> Int {
        if self.is_zero() || other.is_zero() {
            return Int::ZERO;
        }
        let g = self.gcd(other);
        (self.div_exact(&g) * other.clone()).abs()
    }

    /// Extended Euclid: returns `(g, x, y)` with `x*a + y*b = g = gcd(a, b) >= 0`.
    pub fn extended_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
        let (mut old_r, mut r) = (a.clone(), b.clone());
        let (mut old_s, mut s) = (Int::ONE, Int::ZERO);
        let (mut old_t, mut t) = (Int::ZERO, Int::ONE);
        while !r.is_zero() {
            let q = old_r.div_floor(&r);
            let nr = &old_r - &(&q * &r);
            old_r = std::mem::replace(&mut r, nr);
            let ns = &old_s - &(&q * &s);
            old_s = std::mem::replace(&mut s, ns);
            let nt = &old_t - &(&q * &t);
            old_t = std::mem::replace(&mut t, nt);
        }
        if old_r.is_negative() {
            (-old_r, -old_s, -old_t)
        } else {
            (old_r, old_s, old_t)
        }
    }

    pub fn pow(&self, mut e: u32) -> Int {
        let mut base = self.clone();
        let mut acc = Int::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `self += a * b` with a fast path for machine-sized values.
    #[inline]
    pub fn add_mul(&mut self, a: &Int, b: &Int) {
        if let (Small(s), Small(x), Small(y)) = (&*self, a, b) {
            if let Some(p) = x.checked_mul(*y) {
                if let Some(v) = s.checked_add(p) {
                    *self = Small(v);
                    return;
                }
            }
        }
        let p = a * b;
        *self = &*self + &p;
    }

    /// `self -= a * b`.
    #[inline]
    pub fn sub_mul(&mut self, a: &Int, b: &Int) {
        if let (Small(s), Small(x), Small(y)) = (&*self, a, b) {
            if let Some(p) = x.checked_mul(*y) {
                if let Some(v) = s.checked_sub(p) {
                    *self = Small(v);
                    return;
                }
            }
        }
        let p = a * b;
        *self = &*self - &p;
    }
}

impl Default for Int {
    fn default() -> Self {
        Int::ZERO
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Int {
        Small(v)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Int {
        Small(v as i64)
    }
}

impl From<usize> for Int {
    fn from(v: usize) -> Int {
        match i64::try_from(v) {
            Ok(x) => Small(x),
            Err(_) => Int::from_big(BigInt::from(v)),
        }
    }
}

impl From<BigInt> for Int {
    fn from(v: BigInt) -> Int {
        Int::from_big(v)
    }
}

impl PartialEq for Int {
    fn eq(&self, other: &Int) -> bool {
        match (self, other) {
            (Small(a), Small(b)) => a == b,
            (Big(a), Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Int {}

impl PartialEq<i64> for Int {
    fn eq(&self, other: &i64) -> bool {
        matches!(self, Small(a) if a == other)
    }
}

impl Hash for Int {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Small(v) => {
                0u8.hash(state);
                v.hash(state)
            }
            Big(b) => {
                1u8.hash(state);
                b.hash(state)
            }
        }
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Small(a), Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Int) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b Int> for &'a Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: &'b Int) -> Int {
                if let (Small(a), Small(b)) = (self, rhs) {
                    if let Some(v) = a.$checked(*b) {
                        return Small(v);
                    }
                }
                Int::from_big(self.to_big() $op rhs.to_big())
            }
        }
        impl $trait<Int> for Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: Int) -> Int {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b Int> for Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: &'b Int) -> Int {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Int> for &'a Int {
            type Output = Int;
            #[inline]
            fn $method(self, rhs: Int) -> Int {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);

impl AddAssign<&Int> for Int {
    fn add_assign(&mut self, rhs: &Int) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Int> for Int {
    fn sub_assign(&mut self, rhs: &Int) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Int> for Int {
    fn mul_assign(&mut self, rhs: &Int) {
        *self = &*self * rhs;
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Small(v) => match v.checked_neg() {
                Some(n) => Small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Big(b) => Int::from_big(-(**b).clone()),
        }
    }
}

impl Zero for Int {
    fn zero() -> Int {
        Int::ZERO
    }
    fn is_zero(&self) -> bool {
        Int::is_zero(self)
    }
}

impl One for Int {
    fn one() -> Int {
        Int::ONE
    }
}

impl std::iter::Sum for Int {
    fn sum<I: Iterator<Item = Int>>(iter: I) -> Int {
        iter.fold(Int::ZERO, |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Int> for Int {
    fn sum<I: Iterator<Item = &'a Int>>(iter: I) -> Int {
        iter.fold(Int::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Small(v) => write!(f, "{v}"),
            Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Machine-sized values serialize as JSON numbers, larger ones as decimal
// strings so nothing is silently truncated.
impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Small(v) => s.serialize_i64(*v),
            Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Small(v)),
            Repr::Str(s) => s
                .parse::<BigInt>()
                .map(Int::from_big)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let a = Int::from(i64::MAX);
        let b = &a + &Int::ONE;
        assert!(matches!(b, Big(_)));
        let c = &b - &Int::ONE;
        assert!(matches!(c, Small(_)));
        assert_eq!(c, a);
        let sq = &a * &a;
        assert_eq!(sq.to_big(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
    }

    #[test]
    fn extended_gcd_identity() {
        for (a, b) in [(12i64, 18i64), (-7, 3), (0, 5), (5, 0), (3, -9)] {
            let (g, x, y) = Int::extended_gcd(&a.into(), &b.into());
            assert_eq!(&(&x * &Int::from(a)) + &(&y * &Int::from(b)), g);
            assert_eq!(g, Int::from(a).gcd(&b.into()));
        }
    }

    #[test]
    fn rounding_division() {
        assert_eq!(Int::from(7).div_round(&Int::from(2)), Int::from(3));
        assert_eq!(Int::from(8).div_round(&Int::from(3)), Int::from(3));
        assert_eq!(Int::from(-8).div_round(&Int::from(3)), Int::from(-3));
        assert_eq!(Int::from(i64::MIN).div_floor(&Int::from(-1)).to_big(), -BigInt::from(i64::MIN));
    }

    #[test]
    fn serde_roundtrip_big() {
        let big = Int::from_big(BigInt::from(10).pow(30));
        let s = serde_json::to_string(&big).unwrap();
        let back: Int = serde_json::from_str(&s).unwrap();
        assert_eq!(back, big);
        let small: Int = serde_json::from_str("-4").unwrap();
        assert_eq!(small, Int::from(-4));
    }
}
