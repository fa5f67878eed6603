//! Weierstrass functions of a lattice by q-expansions, and the exponential
//! map `C / Lambda -> E`, `z -> (4 wp(z), 4 wp'(z))`, for the differential `dx/y`.

use rug::Float;

use crate::elliptic::Point;
use crate::error::{Error, Result};
use crate::numerics::BigComplex;

use super::lattice::PeriodBasis;

fn two_pi_i_over(w1: &BigComplex, prec: u32) -> BigComplex {
    let two_pi = BigComplex::from_real(&(BigComplex::pi(prec) * 2u32));
    &two_pi.mul_i() / w1
}

fn nome(basis: &PeriodBasis, prec: u32) -> BigComplex {
    let tau = basis.tau().with_prec(prec);
    (&two_pi_i_over(&BigComplex::one(prec), prec) * &tau).exp()
}

/// Terms needed so that `|q|^n` drops below `2^-prec`.
fn term_count(q: &BigComplex, prec: u32) -> usize {
    let lq = q.log2_abs_approx();
    if lq >= -0.5 {
        return 4 * prec as usize;
    }
    (prec as f64 / -lq).ceil() as usize + 3
}

/// `(wp(z), wp'(z))` for the lattice spanned by `basis` (reduced basis expected).
pub fn wp_and_derivative(z: &BigComplex, basis: &PeriodBasis) -> Result<(BigComplex, BigComplex)> {
    let prec = basis.prec().min(z.prec());
    let work = prec + 32;
    let basis = basis.with_prec(work);
    // Center z so that |u| is within |q|^(-1/2) .. |q|^(1/2).
    let (_, b2) = basis.coordinates(&z.with_prec(work))?;
    let n = super::lattice::float_round_i64(&b2)?;
    let zc = &z.with_prec(work) - &basis.omega2.mul_int(n);
    let k = two_pi_i_over(&basis.omega1, work);
    let u = (&k * &zc).exp();
    if (&u - &BigComplex::one(work)).log2_abs_approx() < -(prec as f64) + 4.0 {
        return Err(Error::domain("wp evaluated at a lattice point"));
    }
    let q = nome(&basis, work);
    let terms = term_count(&q, work);
    let one = BigComplex::one(work);
    let frac = |w: &BigComplex| -> (BigComplex, BigComplex) {
        let d = &one - w;
        let d2 = &d * &d;
        let val = w / &d2;
        let der = &(w * &(&one + w)) / &(&d2 * &d);
        (val, der)
    };
    let (mut s, mut sd) = frac(&u);
    let mut qn = one.clone();
    let uinv = &one / &u;
    let mut c = BigComplex::zero(work);
    for _ in 0..terms {
        qn = &qn * &q;
        let (a, ad) = frac(&(&qn * &u));
        let (b, bd) = frac(&(&qn * &uinv));
        s = &(&s + &a) + &b;
        sd = &(&sd + &ad) - &bd;
        let (cq, _) = frac(&qn);
        c = &c + &cq;
    }
    let k2 = &k * &k;
    let twelfth = BigComplex::from_rational(&rug::Rational::from((1, 12)), work);
    let wp = &k2 * &(&(&twelfth + &s) - &c.mul_int(2));
    let wpd = &(&k2 * &k) * &sd;
    Ok((wp.with_prec(prec), wpd.with_prec(prec)))
}

/// Point of `y^2 = x^3 + a x + b` with elliptic logarithm `z`.
pub fn exp_map(z: &BigComplex, basis: &PeriodBasis) -> Result<Point<BigComplex>> {
    let near = basis.reduce_min(z)?;
    let tol = basis.min_norm() * Float::with_val(basis.prec(), Float::i_exp(1, -(basis.prec() as i32) / 2));
    if near.abs() <= tol {
        return Ok(Point::Infinity);
    }
    let (wp, wpd) = wp_and_derivative(z, basis)?;
    Ok(Point::Affine(wp.mul_int(4), wpd.mul_int(4)))
}

/// Curve coefficients `(a, b)` determined by the lattice: `g2 = -a/4`,
/// `g3 = -b/16` with the Eisenstein q-series for `g2`, `g3`.
pub fn lattice_curve_coefficients(basis: &PeriodBasis) -> (BigComplex, BigComplex) {
    let prec = basis.prec();
    let work = prec + 32;
    let basis = basis.with_prec(work);
    let q = nome(&basis, work);
    let terms = term_count(&q, work);
    let one = BigComplex::one(work);
    let mut e4 = BigComplex::zero(work);
    let mut e6 = BigComplex::zero(work);
    let mut qn = one.clone();
    for n in 1..=terms as i64 {
        qn = &qn * &q;
        let mut s3 = 0i64;
        let mut s5 = 0i128;
        for d in 1..=n {
            if n % d == 0 {
                s3 += d * d * d;
                s5 += (d as i128).pow(5);
            }
        }
        e4 = &e4 + &qn.mul_int(s3);
        let s5c = BigComplex::from_rational(&rug::Rational::from(s5), work);
        e6 = &e6 + &(&qn * &s5c);
    }
    let e4 = &one + &e4.mul_int(240);
    let e6 = &one - &e6.mul_int(504);
    let k = &BigComplex::from_real(&(BigComplex::pi(work) * 2u32)) / &basis.omega1;
    let k2 = &k * &k;
    let k4 = &k2 * &k2;
    let g2 = (&k4 * &e4).div_int(12);
    let g3 = (&(&k4 * &k2) * &e6).div_int(216);
    (
        g2.mul_int(-4).with_prec(prec),
        g3.mul_int(-16).with_prec(prec),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Curve;
    use crate::periods::lattice::period_lattice;

    #[test]
    fn lattice_reproduces_curve() {
        for (a, b) in [(-1, 0), (0, 1), (1, 1), (-7, 3), (2, -5)] {
            let e = Curve::from_i64(a, b).unwrap().to_complex(192);
            let basis = period_lattice(&e, 192).unwrap();
            let (ca, cb) = lattice_curve_coefficients(&basis);
            assert!((&ca - e.a()).log2_abs_approx() < -150.0, "a for {} {}", a, b);
            assert!((&cb - e.b()).log2_abs_approx() < -150.0, "b for {} {}", a, b);
        }
    }

    #[test]
    fn exp_lands_on_curve() {
        let e = Curve::from_i64(-2, 3).unwrap().to_complex(192);
        let basis = period_lattice(&e, 192).unwrap();
        let z = BigComplex::from_f64(0.37, 0.21, 192);
        let p = exp_map(&z, &basis).unwrap();
        assert!(e.contains(&p));
        assert!(exp_map(&basis.omega1, &basis).unwrap().is_infinity());
        assert!(exp_map(&basis.combine(2, -3), &basis).unwrap().is_infinity());
    }
}
