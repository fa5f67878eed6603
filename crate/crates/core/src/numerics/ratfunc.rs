use rug::Rational;

use super::complex::BigComplex;
use super::field::{Field, Ring};
use super::poly::Poly;

/// Rational function over Q in one variable, kept reduced with a monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    num: Poly<Rational>,
    den: Poly<Rational>,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::from_poly(Poly::zero())
    }
}

impl RatFunc {
    pub fn new(num: Poly<Rational>, den: Poly<Rational>) -> Self {
        assert!(!den.is_zero_poly(), "zero denominator");
        if num.is_zero_poly() {
            return RatFunc::from_poly(Poly::zero());
        }
        if den.degree() == Some(0) {
            let c = den.leading().unwrap().clone();
            let inv = c.inv_ref();
            return RatFunc {
                num: num.scale(&inv),
                den: Poly::constant(Rational::from(1)),
            };
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let lc = d.leading().unwrap().clone();
        let inv = lc.inv_ref();
        RatFunc {
            num: n.scale(&inv),
            den: d.scale(&inv),
        }
    }

    pub fn from_poly(p: Poly<Rational>) -> Self {
        RatFunc {
            num: p,
            den: Poly::constant(Rational::from(1)),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The variable `t`.
    pub fn var() -> Self {
        RatFunc::from_poly(Poly::from_i64s(&[0, 1]))
    }

    pub fn num(&self) -> &Poly<Rational> {
        &self.num
    }

    pub fn den(&self) -> &Poly<Rational> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn is_constant(&self) -> bool {
        self.is_polynomial() && self.num.degree().unwrap_or(0) == 0
    }

    /// `None` at a pole.
    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(t).div_ref(&d))
    }

    pub fn eval_complex(&self, t: &BigComplex) -> BigComplex {
        let n = self.num.eval_complex(t);
        if self.is_polynomial() {
            return n;
        }
        &n / &self.den.eval_complex(t)
    }

    pub fn derivative(&self) -> Self {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(n, self.den.mul(&self.den))
    }
}

impl Ring for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::default()
    }
    fn one_like(&self) -> Self {
        RatFunc::constant(Rational::from(1))
    }
    fn from_i64_like(&self, n: i64) -> Self {
        RatFunc::constant(Rational::from(n))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero_poly()
    }
    fn add_ref(&self, other: &Self) -> Self {
        if self.is_polynomial() && other.is_polynomial() {
            return RatFunc::from_poly(self.num.add(&other.num));
        }
        RatFunc::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_polynomial() && other.is_polynomial() {
            return RatFunc::from_poly(self.num.mul(&other.num));
        }
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }
    fn neg_ref(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Field for RatFunc {
    fn inv_ref(&self) -> Self {
        RatFunc::new(self.den.clone(), self.num.clone())
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        RatFunc::constant(q.clone())
    }
    fn precision(&self) -> Option<u32> {
        None
    }
    fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_common_factors() {
        // (t^2 - 1) / (t - 1) = t + 1
        let r = RatFunc::new(Poly::from_i64s(&[-1, 0, 1]), Poly::from_i64s(&[-1, 1]));
        assert!(r.is_polynomial());
        assert_eq!(r.num(), &Poly::from_i64s(&[1, 1]));
    }

    #[test]
    fn arithmetic_matches_pointwise() {
        let t = RatFunc::var();
        let f = t.add_ref(&t.one_like()).div_ref(&t.sub_ref(&t.from_i64_like(2)));
        let g = f.mul_ref(&f).sub_ref(&t);
        let x = Rational::from((3, 7));
        let fx = (Rational::from(&x + 1)) / (Rational::from(&x - 2));
        let expect = Rational::from(&fx * &fx) - &x;
        assert_eq!(g.eval(&x).unwrap(), expect);
        assert!(f.eval(&Rational::from(2)).is_none());
    }
}
