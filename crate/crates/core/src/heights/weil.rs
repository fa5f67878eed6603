use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::factor::is_irreducible;
use crate::numerics::{poly_roots, BigComplex, Poly};

/// Algebraic number given by its minimal polynomial and an approximation
/// selecting one root.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicNumber {
    min_poly: Poly<Integer>,
    root: BigComplex,
}

impl AlgebraicNumber {
    /// `poly` must be irreducible over Q; it is normalized to a primitive
    /// integer polynomial with positive leading coefficient.
    pub fn new(poly: &Poly<Rational>, root: BigComplex) -> Result<Self> {
        if poly.degree().unwrap_or(0) == 0 {
            return Err(Error::domain("minimal polynomial must have degree >= 1"));
        }
        if !is_irreducible(poly)? {
            return Err(Error::domain("minimal polynomial is reducible over Q"));
        }
        Ok(AlgebraicNumber {
            min_poly: poly.primitive_integer(),
            root,
        })
    }

    pub fn min_poly(&self) -> &Poly<Integer> {
        &self.min_poly
    }

    pub fn root(&self) -> &BigComplex {
        &self.root
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap()
    }
}

/// `log max(|p|, q)` for `p/q` in lowest terms.
pub fn weil_height_rational(x: &Rational) -> f64 {
    let p = x.numer().clone().abs();
    let q = x.denom().clone();
    let m = if p > q { p } else { q };
    integer_ln(&m)
}

/// Natural logarithm of a positive big integer.
pub fn integer_ln(m: &Integer) -> f64 {
    if *m == 0 {
        return f64::NEG_INFINITY;
    }
    let (mant, exp) = m.to_f64_exp();
    mant.abs().ln() + exp as f64 * std::f64::consts::LN_2
}

/// `(1/d) (log |a0| + sum log max(1, |alpha_i|))` over the conjugates.
pub fn weil_height_algebraic(x: &AlgebraicNumber, prec: u32) -> Result<f64> {
    let p = &x.min_poly;
    let d = p.degree().unwrap();
    if d == 1 {
        let q = Rational::from((-p.coeffs()[0].clone(), p.coeffs()[1].clone()));
        return Ok(weil_height_rational(&q));
    }
    let roots = poly_roots(&p.to_rational().to_complex(prec), prec)?;
    let mut s = integer_ln(&p.leading().unwrap().clone().abs());
    for r in roots {
        let a = r.abs_f64();
        if a > 1.0 {
            s += a.ln();
        }
    }
    Ok(s / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_heights() {
        assert!((weil_height_rational(&Rational::from((3, 2))) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(weil_height_rational(&Rational::new()), 0.0);
        let x = Rational::from((-7, 5));
        assert_eq!(weil_height_rational(&x), weil_height_rational(&x.clone().recip()));
    }

    #[test]
    fn quadratic_height() {
        let a = AlgebraicNumber::new(&Poly::from_i64s(&[-1, 0, 2]), BigComplex::from_f64(0.7, 0.0, 128)).unwrap();
        let h = weil_height_algebraic(&a, 128).unwrap();
        assert!((h - 0.5 * 2f64.ln()).abs() < 1e-14);
        assert!(AlgebraicNumber::new(&Poly::from_i64s(&[-1, 0, 1]), BigComplex::one(128)).is_err());
    }
}
