use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use super::field::{Field, Ring};

/// Smallest precision any numeric value is allowed to carry.
pub const MIN_PRECISION: u32 = 64;
pub const DEFAULT_PRECISION: u32 = 256;

/// Multiprecision complex number. Binary operations round to the smaller
/// of the two operand precisions.
#[derive(Clone, PartialEq)]
pub struct BigComplex(Complex);

fn clamp_prec(p: u32) -> u32 {
    p.max(MIN_PRECISION)
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        BigComplex(Complex::new(clamp_prec(prec)))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn i(prec: u32) -> Self {
        BigComplex(Complex::with_val(clamp_prec(prec), (0, 1)))
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        BigComplex(Complex::with_val(clamp_prec(prec), n))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex(Complex::with_val(clamp_prec(prec), (re, im)))
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        BigComplex(Complex::with_val(clamp_prec(prec), q))
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: u32) -> Self {
        BigComplex(Complex::with_val(clamp_prec(prec), (re, im)))
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        let p = clamp_prec(re.prec().min(im.prec()));
        BigComplex(Complex::with_val(p, (re, im)))
    }

    pub fn from_real(re: &Float) -> Self {
        BigComplex(Complex::with_val(clamp_prec(re.prec()), re))
    }

    pub fn from_complex(c: Complex) -> Self {
        let p = clamp_prec(c.prec().0);
        BigComplex(Complex::with_val(p, c))
    }

    /// Parse "re" or "re im" decimal strings.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        let mut it = s.split_whitespace();
        let re = Float::parse(it.next()?).ok()?;
        let im = match it.next() {
            Some(t) => Float::with_val(clamp_prec(prec), Float::parse(t).ok()?),
            None => Float::new(clamp_prec(prec)),
        };
        if it.next().is_some() {
            return None;
        }
        Some(BigComplex(Complex::with_val(
            clamp_prec(prec),
            (Float::with_val(clamp_prec(prec), re), im),
        )))
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(clamp_prec(prec), Constant::Pi)
    }

    pub fn inner(&self) -> &Complex {
        &self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec().0
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex(Complex::with_val(clamp_prec(prec), &self.0))
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    pub fn re_f64(&self) -> f64 {
        self.0.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.0.imag().to_f64()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.0.abs_ref())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), self.0.norm_ref())
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.0.arg_ref())
    }

    pub fn conj(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.conj_ref()))
    }

    /// Principal square root: Re >= 0, and Im >= 0 when Re = 0.
    pub fn sqrt(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.sqrt_ref()))
    }

    pub fn exp(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.exp_ref()))
    }

    pub fn ln(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn mul_i(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.mul_i_ref(false)))
    }

    pub fn scale_real(&self, f: &Float) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 * f))
    }

    pub fn div_real(&self, f: &Float) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 / f))
    }

    pub fn mul_int(&self, n: i64) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 * n))
    }

    pub fn div_int(&self, n: i64) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 / n))
    }

    /// `1/z` as `conj(z)/|z|^2`; faster than the correctly rounded quotient.
    pub fn recip_fast(&self) -> Self {
        let p = self.prec();
        let n = Float::with_val(p, self.0.norm_ref());
        let re = Float::with_val(p, self.re() / &n);
        let im = Float::with_val(p, self.im() / &n);
        BigComplex::from_floats(re, -im)
    }

    pub fn powi(&self, n: i32) -> Self {
        BigComplex(Complex::with_val(self.prec(), (&self.0).pow(n)))
    }

    pub fn is_zero_exact(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    /// Approximate `log2 |z|`, within half a bit.
    pub fn log2_abs_approx(&self) -> f64 {
        fn lg(f: &Float) -> f64 {
            if f.is_zero() {
                return f64::NEG_INFINITY;
            }
            let (m, e) = f.to_f64_exp();
            e as f64 + m.abs().log2()
        }
        lg(self.re()).max(lg(self.im()))
    }

    /// Lexicographic (Re, Im) comparison used for deterministic orderings.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        self.re()
            .partial_cmp(other.re())
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.im().partial_cmp(other.im()).unwrap_or(Ordering::Equal))
    }

    pub fn dist(&self, other: &Self) -> Float {
        (self - other).abs()
    }

    /// Shortest decimal strings that round-trip at the value's precision.
    pub fn to_decimal_pair(&self) -> (String, String) {
        (float_to_decimal(self.re()), float_to_decimal(self.im()))
    }
}

pub fn float_to_decimal(f: &Float) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    f.to_string_radix(10, None)
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.20e} {:+.20e}i)", self.re_f64(), self.im_f64())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, i) = self.to_decimal_pair();
        write!(f, "{} {}", r, i)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<'a> $tr<&'a BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &'a BigComplex) -> BigComplex {
                let p = self.prec().min(rhs.prec());
                BigComplex(Complex::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &'a BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex(-self.0)
    }
}

impl<'a> Neg for &'a BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex(Complex::with_val(self.prec(), -&self.0))
    }
}

impl Ring for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        BigComplex::one(self.prec())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigComplex::from_i64(n, self.prec())
    }
    fn is_zero(&self) -> bool {
        self.is_zero_exact()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Field for BigComplex {
    fn inv_ref(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.recip_ref()))
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        BigComplex::from_rational(q, self.prec())
    }
    fn precision(&self) -> Option<u32> {
        Some(self.prec())
    }
    fn log2_abs(&self) -> f64 {
        self.log2_abs_approx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_precision_rounds_to_minimum() {
        let a = BigComplex::from_f64(1.0, 2.0, 128);
        let b = BigComplex::from_f64(3.0, -1.0, 256);
        assert_eq!((&a + &b).prec(), 128);
        assert_eq!((&b * &a).prec(), 128);
    }

    #[test]
    fn precision_is_clamped() {
        assert_eq!(BigComplex::zero(10).prec(), MIN_PRECISION);
    }

    #[test]
    fn sqrt_branch_is_principal() {
        let z = BigComplex::from_f64(-4.0, 0.0, 128);
        let r = z.sqrt();
        assert!(r.re_f64().abs() < 1e-30);
        assert!((r.im_f64() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn parse_roundtrip() {
        let z = BigComplex::from_f64(0.1, -2.5, 256);
        let s = z.to_string();
        let w = BigComplex::parse(&s, 256).unwrap();
        assert_eq!(z, w);
    }
}
