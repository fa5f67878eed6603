use rug::Rational;

use crate::error::{Error, Result};
use crate::numerics::{negligible, BigComplex, Field};

/// Whether coordinates are exact rationals or multiprecision floats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Exact,
    Numeric,
}

/// Short Weierstrass curve `y^2 = x^3 + a x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve<F> {
    a: F,
    b: F,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Point<F> {
    Infinity,
    Affine(F, F),
}

impl<F: Clone> Point<F> {
    pub fn affine(x: F, y: F) -> Self {
        Point::Affine(x, y)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            Point::Infinity => None,
            Point::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            Point::Infinity => None,
            Point::Affine(_, y) => Some(y),
        }
    }
}

impl Point<Rational> {
    pub fn from_i64(x: i64, y: i64) -> Self {
        Point::Affine(Rational::from(x), Rational::from(y))
    }
}

impl<F: Field> Curve<F> {
    /// Rejects singular curves (numerically singular ones in numeric kind).
    pub fn new(a: F, b: F) -> Result<Self> {
        let c = Curve { a, b };
        let disc = c.discriminant();
        let scale = c.disc_scale_log2();
        if negligible(&disc, scale, 0.5) {
            return Err(Error::domain(format!(
                "singular curve y^2 = x^3 + ({:?}) x + ({:?})",
                c.a, c.b
            )));
        }
        Ok(c)
    }

    pub fn a(&self) -> &F {
        &self.a
    }

    pub fn b(&self) -> &F {
        &self.b
    }

    pub fn kind(&self) -> ScalarKind {
        match self.a.precision() {
            None => ScalarKind::Exact,
            Some(_) => ScalarKind::Numeric,
        }
    }

    pub fn precision(&self) -> Option<u32> {
        self.a.precision()
    }

    /// `-16 (4 a^3 + 27 b^2)`.
    pub fn discriminant(&self) -> F {
        let a3 = self.a.pow_u(3).scale_i64(4);
        let b2 = self.b.square().scale_i64(27);
        a3.add_ref(&b2).scale_i64(-16)
    }

    fn disc_scale_log2(&self) -> f64 {
        let la = 3.0 * self.a.log2_abs();
        let lb = 2.0 * self.b.log2_abs();
        la.max(lb).max(0.0) + 9.0
    }

    /// `1728 * 4a^3 / (4a^3 + 27b^2)`.
    pub fn j_invariant(&self) -> Result<F> {
        let a3 = self.a.pow_u(3).scale_i64(4);
        let den = a3.add_ref(&self.b.square().scale_i64(27));
        if den.is_zero() {
            return Err(Error::domain("j-invariant of a singular curve"));
        }
        Ok(a3.scale_i64(1728).div_ref(&den))
    }

    /// Right-hand side `x^3 + a x + b`.
    pub fn rhs(&self, x: &F) -> F {
        x.pow_u(3).add_ref(&self.a.mul_ref(x)).add_ref(&self.b)
    }

    /// Exact membership, or relative residual at most `2^(-prec/2)`.
    pub fn contains(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let res = y.square().sub_ref(&self.rhs(x));
                let scale = [
                    2.0 * y.log2_abs(),
                    3.0 * x.log2_abs(),
                    self.a.log2_abs() + x.log2_abs(),
                    self.b.log2_abs(),
                ]
                .into_iter()
                .fold(0.0f64, f64::max);
                negligible(&res, scale, 0.5)
            }
        }
    }

    fn check(&self, p: &Point<F>) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(format!("point {:?} is not on the curve", p)))
        }
    }

    pub fn neg(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), y.neg_ref()),
        }
    }

    /// Chord-tangent addition with on-curve validation.
    pub fn add(&self, p: &Point<F>, q: &Point<F>) -> Result<Point<F>> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    fn same(&self, u: &F, v: &F) -> bool {
        let d = u.sub_ref(v);
        negligible(&d, u.log2_abs().max(v.log2_abs()), 0.5)
    }

    /// Group law without membership checks; inputs must lie on the curve.
    pub fn add_unchecked(&self, p: &Point<F>, q: &Point<F>) -> Point<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if self.same(x1, x2) {
            let sum = y1.add_ref(y2);
            if self.same(y1, &y2.neg_ref()) || sum.is_zero() {
                return Point::Infinity;
            }
            let num = x1.square().scale_i64(3).add_ref(&self.a);
            num.div_ref(&y1.scale_i64(2))
        } else {
            y2.sub_ref(y1).div_ref(&x2.sub_ref(x1))
        };
        let x3 = lambda.square().sub_ref(x1).sub_ref(x2);
        let y3 = lambda.mul_ref(&x1.sub_ref(&x3)).sub_ref(y1);
        Point::Affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F>) -> Point<F> {
        self.add_unchecked(p, p)
    }

    /// Double-and-add scalar multiplication; negative `n` negates.
    pub fn mul(&self, n: i64, p: &Point<F>) -> Result<Point<F>> {
        self.check(p)?;
        Ok(self.mul_unchecked(n, p))
    }

    pub fn mul_unchecked(&self, n: i64, p: &Point<F>) -> Point<F> {
        let base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        let mut pow = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &pow);
            }
            k >>= 1;
            if k > 0 {
                pow = self.double(&pow);
            }
        }
        acc
    }
}

impl Curve<Rational> {
    pub fn from_i64(a: i64, b: i64) -> Result<Self> {
        Curve::new(Rational::from(a), Rational::from(b))
    }

    /// Numeric copy at the given precision.
    pub fn to_complex(&self, prec: u32) -> Curve<BigComplex> {
        Curve {
            a: BigComplex::from_rational(&self.a, prec),
            b: BigComplex::from_rational(&self.b, prec),
        }
    }

    /// Smallest `n <= bound` with `n P = O`.
    pub fn torsion_order(&self, p: &Point<Rational>, bound: u32) -> Result<Option<u32>> {
        self.check(p)?;
        let mut q = p.clone();
        for n in 1..=bound {
            if q.is_infinity() {
                return Ok(Some(n));
            }
            if n < bound {
                q = self.add_unchecked(&q, p);
            }
        }
        Ok(None)
    }
}

pub fn point_to_complex(p: &Point<Rational>, prec: u32) -> Point<BigComplex> {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => Point::Affine(
            BigComplex::from_rational(x, prec),
            BigComplex::from_rational(y, prec),
        ),
    }
}

/// Mazur's bound on rational torsion orders.
pub const DEFAULT_TORSION_BOUND: u32 = 12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_inverse() {
        let e = Curve::from_i64(-2, 1).unwrap();
        let p = Point::from_i64(0, 1);
        assert_eq!(e.add(&p, &Point::Infinity).unwrap(), p);
        assert!(e.add(&p, &e.neg(&p)).unwrap().is_infinity());
    }

    #[test]
    fn two_torsion_sum() {
        let e = Curve::from_i64(-1, 0).unwrap();
        let s = e.add(&Point::from_i64(0, 0), &Point::from_i64(1, 0)).unwrap();
        assert_eq!(s, Point::from_i64(-1, 0));
        assert!(e.mul(2, &Point::from_i64(0, 0)).unwrap().is_infinity());
    }

    #[test]
    fn doubling_on_x3_plus_1() {
        let e = Curve::from_i64(0, 1).unwrap();
        let p = Point::from_i64(2, 3);
        assert_eq!(e.mul(2, &p).unwrap(), Point::from_i64(0, 1));
        assert_eq!(e.mul(1, &p).unwrap(), p);
        assert_eq!(e.mul(-2, &p).unwrap(), Point::from_i64(0, -1));
    }

    #[test]
    fn torsion_orders() {
        let e = Curve::from_i64(-1, 0).unwrap();
        assert_eq!(e.torsion_order(&Point::from_i64(0, 0), 12).unwrap(), Some(2));
        let e = Curve::from_i64(-2, 1).unwrap();
        assert_eq!(e.torsion_order(&Point::from_i64(0, 1), 12).unwrap(), Some(4));
        let e = Curve::from_i64(0, 1).unwrap();
        assert_eq!(e.torsion_order(&Point::from_i64(2, 3), 12).unwrap(), Some(6));
        // (3, 5) on y^2 = x^3 - 2 has infinite order
        let e = Curve::from_i64(0, -2).unwrap();
        assert_eq!(e.torsion_order(&Point::from_i64(3, 5), 12).unwrap(), None);
    }

    #[test]
    fn j_invariants_and_singular() {
        assert_eq!(Curve::from_i64(-1, 0).unwrap().j_invariant().unwrap(), 1728);
        assert_eq!(Curve::from_i64(0, 1).unwrap().j_invariant().unwrap(), 0);
        assert!(Curve::from_i64(-3, 2).is_err());
    }

    #[test]
    fn off_curve_is_rejected() {
        let e = Curve::from_i64(0, 1).unwrap();
        assert!(e.add(&Point::from_i64(1, 1), &Point::Infinity).is_err());
    }

    #[test]
    fn numeric_kind_matches_exact() {
        let e = Curve::from_i64(0, 1).unwrap();
        let ec = e.to_complex(128);
        let p = point_to_complex(&Point::from_i64(2, 3), 128);
        let q = ec.mul(3, &p).unwrap();
        assert!((q.x().unwrap().re_f64() + 1.0).abs() < 1e-30);
        assert!(ec.mul(6, &p).unwrap().is_infinity());
        assert_eq!(ec.kind(), ScalarKind::Numeric);
    }
}
