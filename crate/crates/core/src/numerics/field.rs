//! Minimal algebraic traits shared by the exact and numeric code paths.
//!
//! Elements of numeric rings carry their own precision, so constants are
//! produced "like" an existing element instead of from nothing.

use std::fmt::Debug;

use rug::{Integer, Rational};

pub trait Ring: Clone + Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    /// Exact zero test. Numeric callers that need a tolerance use [`negligible`].
    fn is_zero(&self) -> bool;

    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn square(&self) -> Self {
        self.mul_ref(self)
    }

    fn pow_u(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    fn scale_i64(&self, n: i64) -> Self {
        self.mul_ref(&self.from_i64_like(n))
    }
}

pub trait Field: Ring {
    /// Multiplicative inverse; callers guarantee `!self.is_zero()`.
    fn inv_ref(&self) -> Self;

    fn div_ref(&self, other: &Self) -> Self {
        self.mul_ref(&other.inv_ref())
    }

    fn from_rational_like(&self, q: &Rational) -> Self;

    /// `None` for exact fields.
    fn precision(&self) -> Option<u32>;

    /// Approximate `log2 |self|`; `-inf` for zero. Exact fields that have no
    /// meaningful absolute value return `0.0` for nonzero elements.
    fn log2_abs(&self) -> f64;
}

/// Zero test that is exact in exact fields and relative in numeric ones:
/// `|v| <= 2^(scale_log2 - precision * ratio)`.
pub fn negligible<F: Field>(v: &F, scale_log2: f64, ratio: f64) -> bool {
    match v.precision() {
        None => v.is_zero(),
        Some(p) => {
            if v.is_zero() {
                return true;
            }
            v.log2_abs() <= scale_log2.max(0.0) - p as f64 * ratio
        }
    }
}

impl Ring for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Rational::from(n)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add_ref(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn neg_ref(&self) -> Self {
        Rational::from(-self)
    }
}

impl Field for Rational {
    fn inv_ref(&self) -> Self {
        Rational::from(self.recip_ref())
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        q.clone()
    }
    fn precision(&self) -> Option<u32> {
        None
    }
    fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let n = self.numer().significant_bits() as f64;
        let d = self.denom().significant_bits() as f64;
        n - d
    }
}

impl Ring for Integer {
    fn zero_like(&self) -> Self {
        Integer::new()
    }
    fn one_like(&self) -> Self {
        Integer::from(1)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Integer::from(n)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add_ref(&self, other: &Self) -> Self {
        Integer::from(self + other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        Integer::from(self - other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        Integer::from(self * other)
    }
    fn neg_ref(&self) -> Self {
        Integer::from(-self)
    }
}
