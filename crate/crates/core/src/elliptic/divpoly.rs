//! Division polynomials in the reduced convention: `psi_n = f_n` for odd `n`
//! and `psi_n = 2y * f_n` for even `n`, with every `f_n` a polynomial in `x`.

use std::collections::BTreeMap;

use rug::Rational;

use crate::error::{Error, Result};
use crate::numerics::{Poly, Ring};

use super::curve::Curve;

/// Largest supported index.
pub const MAX_DIVISION_INDEX: u32 = 64;

/// `psi_n` as a polynomial in `x` over the coefficient ring `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisionPoly<R> {
    pub n: u32,
    /// Reduced factor `f_n`; the full `psi_n` is `2y * f_n` when `even`.
    pub f: Poly<R>,
    pub even: bool,
}

impl<R: Ring + Default> DivisionPoly<R> {
    /// `psi_n(x, y)`.
    pub fn eval(&self, x: &R, y: &R) -> R {
        let v = self.f.eval(x);
        if self.even {
            v.mul_ref(&y.scale_i64(2))
        } else {
            v
        }
    }
}

/// Values `f_k(x)` for the requested `n`, computed by the standard recurrence
/// over any commutative ring. `x`, `a`, `b` may be numbers, polynomials in
/// `x`, or functions of a parameter.
pub fn reduced_value<R: Ring>(n: u32, x: &R, a: &R, b: &R) -> Result<R> {
    if n == 0 {
        return Err(Error::domain("division polynomial index must be >= 1"));
    }
    if n > MAX_DIVISION_INDEX {
        return Err(Error::Capability(format!(
            "division polynomial index {} exceeds {}",
            n, MAX_DIVISION_INDEX
        )));
    }
    let mut ctx = Recurrence::new(x, a, b);
    Ok(ctx.get(n))
}

struct Recurrence<R> {
    memo: BTreeMap<u32, R>,
    big_f_sq: R,
}

impl<R: Ring> Recurrence<R> {
    fn new(x: &R, a: &R, b: &R) -> Self {
        let x2 = x.square();
        let x3 = x2.mul_ref(x);
        let ax = a.mul_ref(x);
        // F = 4 (x^3 + a x + b) = (2y)^2
        let big_f = x3.add_ref(&ax).add_ref(b).scale_i64(4);
        let mut memo = BTreeMap::new();
        memo.insert(0, x.zero_like());
        memo.insert(1, x.one_like());
        memo.insert(2, x.one_like());
        let a2 = a.square();
        let f3 = x2
            .square()
            .scale_i64(3)
            .add_ref(&a.mul_ref(&x2).scale_i64(6))
            .add_ref(&b.mul_ref(x).scale_i64(12))
            .sub_ref(&a2);
        memo.insert(3, f3);
        let x4 = x2.square();
        let f4 = x4
            .mul_ref(&x2)
            .add_ref(&a.mul_ref(&x4).scale_i64(5))
            .add_ref(&b.mul_ref(&x3).scale_i64(20))
            .sub_ref(&a2.mul_ref(&x2).scale_i64(5))
            .sub_ref(&a.mul_ref(b).mul_ref(x).scale_i64(4))
            .sub_ref(&b.square().scale_i64(8))
            .sub_ref(&a2.mul_ref(a))
            .scale_i64(2);
        memo.insert(4, f4);
        Recurrence {
            memo,
            big_f_sq: big_f.square(),
        }
    }

    fn get(&mut self, n: u32) -> R {
        if let Some(v) = self.memo.get(&n) {
            return v.clone();
        }
        let m = n / 2;
        let v = if n % 2 == 1 {
            let fm2 = self.get(m + 2);
            let fm = self.get(m);
            let fm1 = self.get(m - 1);
            let fp1 = self.get(m + 1);
            let t1 = fm2.mul_ref(&fm.pow_u(3));
            let t2 = fm1.mul_ref(&fp1.pow_u(3));
            if m % 2 == 0 {
                self.big_f_sq.mul_ref(&t1).sub_ref(&t2)
            } else {
                t1.sub_ref(&self.big_f_sq.mul_ref(&t2))
            }
        } else {
            let fm = self.get(m);
            let fm2 = self.get(m + 2);
            let fm1 = self.get(m - 1);
            let fmm2 = self.get(m - 2);
            let fp1 = self.get(m + 1);
            fm.mul_ref(&fm2.mul_ref(&fm1.square()).sub_ref(&fmm2.mul_ref(&fp1.square())))
        };
        self.memo.insert(n, v.clone());
        v
    }
}

/// `psi_n` of a single curve over Q, as a polynomial in `x`.
pub fn division_polynomial(e: &Curve<Rational>, n: u32) -> Result<DivisionPoly<Rational>> {
    let x = Poly::from_i64s(&[0, 1]);
    let a = Poly::constant(e.a().clone());
    let b = Poly::constant(e.b().clone());
    Ok(DivisionPoly {
        n,
        f: reduced_value(n, &x, &a, &b)?,
        even: n % 2 == 0,
    })
}

/// `psi_n` with coefficients in an arbitrary ring (for example rational
/// functions of a family parameter).
pub fn division_polynomial_over<R: Ring + Default>(a: &R, b: &R, n: u32) -> Result<DivisionPoly<R>> {
    let one = a.one_like();
    let x = Poly::new(vec![a.zero_like(), one]);
    let pa = Poly::constant(a.clone());
    let pb = Poly::constant(b.clone());
    Ok(DivisionPoly {
        n,
        f: reduced_value(n, &x, &pa, &pb)?,
        even: n % 2 == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::curve::Point;

    #[test]
    fn base_cases() {
        let e = Curve::from_i64(-2, 3).unwrap();
        let p1 = division_polynomial(&e, 1).unwrap();
        assert_eq!(p1.f, Poly::from_i64s(&[1]));
        let p2 = division_polynomial(&e, 2).unwrap();
        assert!(p2.even);
        assert_eq!(p2.f, Poly::from_i64s(&[1]));
        // 3x^4 + 6a x^2 + 12 b x - a^2 with a = -2, b = 3
        let p3 = division_polynomial(&e, 3).unwrap();
        assert_eq!(p3.f, Poly::from_i64s(&[-4, 36, -12, 0, 3]));
    }

    #[test]
    fn degrees() {
        let e = Curve::from_i64(1, 1).unwrap();
        for n in 1..=12u32 {
            let d = division_polynomial(&e, n).unwrap().f.degree().unwrap();
            let expect = if n % 2 == 1 { (n * n - 1) / 2 } else { (n * n - 4) / 2 };
            assert_eq!(d as u32, expect, "n = {}", n);
        }
    }

    #[test]
    fn capability_bound() {
        let e = Curve::from_i64(1, 1).unwrap();
        assert!(matches!(division_polynomial(&e, 65), Err(Error::Capability(_))));
    }

    #[test]
    fn vanishing_matches_point_order() {
        // (2,3) on y^2 = x^3 + 1 has order 6.
        let e = Curve::from_i64(0, 1).unwrap();
        let p = Point::from_i64(2, 3);
        for n in 1..=12u32 {
            let v = division_polynomial(&e, n)
                .unwrap()
                .eval(&Rational::from(2), &Rational::from(3));
            let killed = e.mul(n as i64, &p).unwrap().is_infinity();
            assert_eq!(v == 0, killed, "n = {}", n);
        }
    }
}
