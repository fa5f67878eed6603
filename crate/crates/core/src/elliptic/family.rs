//! One-parameter families `y^2 = x^3 + a(t) x + b(t)` and their sections.

use rug::Rational;

use crate::error::{Error, Result};
use crate::numerics::{poly_roots, BigComplex, Field, Poly, RatFunc, Ring};

use super::curve::{Curve, Point};
use super::divpoly::{division_polynomial_over, reduced_value, DivisionPoly};

#[derive(Clone, Debug, PartialEq)]
pub struct CurveFamily {
    a: RatFunc,
    b: RatFunc,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    x: RatFunc,
    y: RatFunc,
}

/// Largest order checked when validating that a section is not torsion.
const SECTION_TORSION_CHECK: u32 = 12;

impl CurveFamily {
    /// Rejects isotrivial families (constant `j`).
    pub fn new(a: RatFunc, b: RatFunc, label: impl Into<String>) -> Result<Self> {
        let fam = CurveFamily {
            a,
            b,
            label: label.into(),
        };
        let j = fam.j_invariant()?;
        if j.is_constant() {
            return Err(Error::domain("isotrivial family: j(t) is constant"));
        }
        Ok(fam)
    }

    /// `y^2 = x^3 + t x + 1`.
    pub fn demo() -> Self {
        CurveFamily::new(RatFunc::var(), RatFunc::constant(Rational::from(1)), "demo")
            .expect("demo family is non-isotrivial")
    }

    /// Legendre family `y^2 = x (x - 1)(x - t)` moved to short form by
    /// `x -> x + (1 + t)/3`.
    pub fn legendre() -> Self {
        let third = Rational::from((1, 3));
        let a = RatFunc::from_poly(Poly::from_i64s(&[-1, 1, -1]).scale(&third));
        // -(1 + t)(2t - 1)(t - 2) / 27
        let b = Poly::from_i64s(&[1, 1])
            .mul(&Poly::from_i64s(&[-1, 2]))
            .mul(&Poly::from_i64s(&[-2, 1]))
            .scale(&Rational::from((-1, 27)));
        CurveFamily::new(a, RatFunc::from_poly(b), "legendre").expect("legendre family")
    }

    pub fn a(&self) -> &RatFunc {
        &self.a
    }

    pub fn b(&self) -> &RatFunc {
        &self.b
    }

    pub fn discriminant(&self) -> RatFunc {
        let a3 = self.a.pow_u(3).scale_i64(4);
        a3.add_ref(&self.b.square().scale_i64(27)).scale_i64(-16)
    }

    pub fn j_invariant(&self) -> Result<RatFunc> {
        let a3 = self.a.pow_u(3).scale_i64(4);
        let den = a3.add_ref(&self.b.square().scale_i64(27));
        if den.is_zero() {
            return Err(Error::domain("family is singular at every parameter"));
        }
        Ok(a3.scale_i64(1728).div_ref(&den))
    }

    /// Finite parameters where the fiber is singular or undefined: zeros of
    /// the discriminant numerator and poles of `a`, `b`.
    pub fn singular_parameters(&self, prec: u32) -> Result<Vec<BigComplex>> {
        let mut p = self.discriminant().num().clone();
        p = p.mul(self.a.den()).mul(self.b.den());
        let sq = p.squarefree_part();
        if sq.degree().unwrap_or(0) == 0 {
            return Ok(vec![]);
        }
        poly_roots(&sq.to_complex(prec), prec)
    }

    /// Exact fiber at a rational parameter.
    pub fn fiber(&self, t: &Rational) -> Result<Curve<Rational>> {
        let a = self.a.eval(t);
        let b = self.b.eval(t);
        match (a, b) {
            (Some(a), Some(b)) => {
                Curve::new(a, b).map_err(|_| Error::SingularFiber(t.to_string()))
            }
            _ => Err(Error::SingularFiber(t.to_string())),
        }
    }

    /// Numeric fiber at a complex parameter.
    pub fn fiber_complex(&self, t: &BigComplex) -> Result<Curve<BigComplex>> {
        let (a, b) = self.coefficients_at(t)?;
        Curve::new(a, b).map_err(|_| Error::SingularFiber(t.to_string()))
    }

    /// `(a(t), b(t))` without the singularity check.
    pub fn coefficients_at(&self, t: &BigComplex) -> Result<(BigComplex, BigComplex)> {
        let a = self.a.eval_complex(t);
        let b = self.b.eval_complex(t);
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::SingularFiber(t.to_string()));
        }
        Ok((a, b))
    }

    /// `psi_n` with coefficients rational functions of `t`.
    pub fn division_polynomial(&self, n: u32) -> Result<DivisionPoly<RatFunc>> {
        division_polynomial_over(&self.a, &self.b, n)
    }
}

impl Section {
    /// Validates the curve equation identically in `t` and that the section
    /// is not killed by any `n <= 12`.
    pub fn new(family: &CurveFamily, x: RatFunc, y: RatFunc) -> Result<Self> {
        let lhs = y.square();
        let rhs = x.pow_u(3).add_ref(&family.a.mul_ref(&x)).add_ref(&family.b);
        if !lhs.sub_ref(&rhs).is_zero() {
            return Err(Error::domain("section does not satisfy the family equation"));
        }
        let s = Section { x, y };
        for n in 1..=SECTION_TORSION_CHECK {
            if s.psi_specialization(family, n)?.is_zero() {
                return Err(Error::domain(format!("section is identically {}-torsion", n)));
            }
        }
        Ok(s)
    }

    /// The section `(0, 1)` of the demo family.
    pub fn demo() -> Self {
        Section::new(
            &CurveFamily::demo(),
            RatFunc::constant(Rational::new()),
            RatFunc::constant(Rational::from(1)),
        )
        .expect("demo section")
    }

    pub fn x(&self) -> &RatFunc {
        &self.x
    }

    pub fn y(&self) -> &RatFunc {
        &self.y
    }

    /// `psi_n(x(t), y(t))` as a rational function of `t`; its numerator
    /// vanishes exactly where `n * s(t) = O` on smooth fibers.
    pub fn psi_specialization(&self, family: &CurveFamily, n: u32) -> Result<RatFunc> {
        let f = reduced_value(n, &self.x, &family.a, &family.b)?;
        if n % 2 == 0 {
            Ok(f.mul_ref(&self.y.scale_i64(2)))
        } else {
            Ok(f)
        }
    }

    pub fn point_at(&self, t: &Rational) -> Option<Point<Rational>> {
        Some(Point::Affine(self.x.eval(t)?, self.y.eval(t)?))
    }

    pub fn point_at_complex(&self, t: &BigComplex) -> Point<BigComplex> {
        Point::Affine(self.x.eval_complex(t), self.y.eval_complex(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_specializations() {
        let fam = CurveFamily::demo();
        let s = Section::demo();
        let p3 = s.psi_specialization(&fam, 3).unwrap();
        assert_eq!(p3, RatFunc::from_poly(Poly::from_i64s(&[0, 0, -1])));
        let p4 = s.psi_specialization(&fam, 4).unwrap();
        assert_eq!(p4, RatFunc::from_poly(Poly::from_i64s(&[-32, 0, 0, -4])));
    }

    #[test]
    fn legendre_j_at_half() {
        let j = CurveFamily::legendre().j_invariant().unwrap();
        assert_eq!(j.eval(&Rational::from((1, 2))).unwrap(), 1728);
        // j = 256 (t^2 - t + 1)^3 / (t^2 (t - 1)^2)
        let t = Rational::from((3, 5));
        let t2 = Rational::from(&t * &t);
        let num = Rational::from(&t2 - &t) + 1u32;
        let num = Rational::from(num.clone() * &num) * num * 256u32;
        let den = t2 * Rational::from(&t - 1u32).square();
        assert_eq!(j.eval(&t).unwrap(), num / den);
    }

    #[test]
    fn singular_parameters_of_demo() {
        // Delta = -16 (4 t^3 + 27)
        let roots = CurveFamily::demo().singular_parameters(128).unwrap();
        assert_eq!(roots.len(), 3);
        let real: Vec<_> = roots.iter().filter(|r| r.im_f64().abs() < 1e-20).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].re_f64() + 1.889881574842).abs() < 1e-10);
        assert!(matches!(
            CurveFamily::demo().fiber(&Rational::from(0)).map(|_| ()),
            Ok(())
        ));
    }

    #[test]
    fn isotrivial_and_bad_sections_rejected() {
        let c = RatFunc::constant(Rational::from(1));
        assert!(CurveFamily::new(c.clone(), c.clone(), "const").is_err());
        let fam = CurveFamily::demo();
        assert!(Section::new(&fam, c.clone(), c.clone()).is_err());
    }

    #[test]
    fn fiber_matches_curve_arithmetic() {
        let fam = CurveFamily::demo();
        let s = Section::demo();
        let t = Rational::from(-2);
        let e = fam.fiber(&t).unwrap();
        let p = s.point_at(&t).unwrap();
        assert_eq!(e.torsion_order(&p, 12).unwrap(), Some(4));
        let e0 = fam.fiber(&Rational::new()).unwrap();
        assert_eq!(e0.torsion_order(&s.point_at(&Rational::new()).unwrap(), 12).unwrap(), Some(3));
    }
}
