//! Canonical (Neron-Tate) height by the doubling limit `4^-k h(x(2^k P))`.

use std::collections::HashSet;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::elliptic::{Curve, Point};
use crate::error::{Error, Result};

use super::weil::integer_ln;

/// Determinant of an integer matrix by fraction-free elimination.
fn bareiss_det(mut m: Vec<Vec<Integer>>) -> Integer {
    let n = m.len();
    let mut sign = 1;
    let mut prev = Integer::from(1);
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = Integer::from(&m[i][j] * &m[k][k]) - Integer::from(&m[i][k] * &m[k][j]);
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    prev * sign
}

/// Resultant of two univariate integer polynomials (coefficients low first).
fn resultant(f: &[Integer], g: &[Integer]) -> Integer {
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let n = df + dg;
    let mut m = vec![vec![Integer::new(); n]; n];
    for r in 0..dg {
        for (k, c) in f.iter().rev().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..df {
        for (k, c) in g.iter().rev().enumerate() {
            m[dg + r][r + k] = c.clone();
        }
    }
    bareiss_det(m)
}

/// Integral model `(u^4 a, u^6 b)` and the scale `u`.
fn integral_model(e: &Curve<Rational>) -> (Integer, Integer, Integer) {
    let u = Integer::from(e.a().denom().lcm_ref(e.b().denom()));
    let u2 = Integer::from(&u * &u);
    let u4 = Integer::from(&u2 * &u2);
    let u6 = Integer::from(&u4 * &u2);
    let a = Rational::from(e.a() * &u4);
    let b = Rational::from(e.b() * &u6);
    (a.numer().clone(), b.numer().clone(), u)
}

/// Doubling numerator and denominator for `x = p/q` on `y^2 = x^3 + a x + b`.
fn double_forms(p: &Integer, q: &Integer, a: &Integer, b: &Integer) -> (Integer, Integer) {
    let p2 = Integer::from(p * p);
    let q2 = Integer::from(q * q);
    let q3 = Integer::from(&q2 * q);
    let n = Integer::from(&p2 * &p2) - Integer::from(&p2 * &q2) * Integer::from(2 * a)
        - Integer::from(p * &q3) * Integer::from(8 * b)
        + Integer::from(&q2 * &q2) * Integer::from(a * a);
    let cubic = Integer::from(&p2 * p) + Integer::from(p * &q2) * a + Integer::from(&q3 * b);
    let d = Integer::from(q * &cubic) * 4u32;
    (n, d)
}

fn float_forms(u: &Float, v: &Float, a: &Float, b: &Float) -> (Float, Float) {
    let u2 = Float::with_val(u.prec(), u * u);
    let v2 = Float::with_val(u.prec(), v * v);
    let uv = Float::with_val(u.prec(), u * v);
    let v3 = Float::with_val(u.prec(), &v2 * v);
    let f = Float::with_val(u.prec(), &u2 * &u2) - Float::with_val(u.prec(), &u2 * &v2) * a * 2u32
        - Float::with_val(u.prec(), u * &v3) * b * 8u32
        + Float::with_val(u.prec(), &v2 * &v2) * Float::with_val(u.prec(), a * a);
    let cubic = Float::with_val(u.prec(), &u2 * u) + Float::with_val(u.prec(), &uv * v) * a + Float::with_val(u.prec(), &v3 * b);
    let g = Float::with_val(u.prec(), v * &cubic) * 4u32;
    (f, g)
}

/// Scale `(u, v)` so that `max(|u|, |v|) = 1`.
fn normalize(u: &mut Float, v: &mut Float) {
    let m = if u.clone().abs() >= v.clone().abs() { u.clone().abs() } else { v.clone().abs() };
    *u /= &m;
    *v /= &m;
}

fn float_ln(x: &Float) -> f64 {
    Float::with_val(x.prec(), x.ln_ref()).to_f64()
}

/// Exact doublings run until coordinates reach this many bits.
const EXACT_BITS: u32 = 2048;

/// Series terms beyond this weight are dropped.
const SERIES_TOLERANCE: f64 = 1e-13;

/// `lim 4^-k log max(|p_k|, q_k)` with `x(2^k P) = p_k / q_k`, at 128 bits.
/// Torsion points give exactly 0.
pub fn canonical_height(e: &Curve<Rational>, p: &Point<Rational>) -> Result<f64> {
    canonical_height_prec(e, p, 128)
}

/// The first doublings are exact and detect torsion. The rest of the limit
/// is summed as `sum 4^-(j+1) (log r(x_j) - log g_j)`, where `r` is the
/// projective growth of the doubling forms (evaluated in floating point) and
/// `g_j` the cancelled common factor (tracked modulo powers of the resultant).
pub fn canonical_height_prec(e: &Curve<Rational>, p: &Point<Rational>, prec: u32) -> Result<f64> {
    if !e.contains(p) {
        return Err(Error::domain("point is not on the curve"));
    }
    let x = match p {
        Point::Infinity => return Ok(0.0),
        Point::Affine(x, _) => x,
    };
    let (a, b, u) = integral_model(e);
    let xs = Rational::from(x * Integer::from(&u * &u));
    let (mut num, mut den) = xs.into_numer_denom();

    // Any common factor of the doubling numerator and denominator divides R.
    let f = [
        Integer::from(&a * &a),
        Integer::from(-8 * &b),
        Integer::from(-2 * &a),
        Integer::new(),
        Integer::from(1),
    ];
    let g = [Integer::from(4 * &b), Integer::from(4 * &a), Integer::new(), Integer::from(4)];
    let r = resultant(&f, &g).abs();
    if r == 0 {
        return Err(Error::domain("singular curve"));
    }

    let mut seen: HashSet<(Integer, Integer)> = HashSet::new();
    let mut k = 0u32;
    while num.significant_bits().max(den.significant_bits()) < EXACT_BITS {
        if den == 0 || !seen.insert((num.clone(), den.clone())) {
            return Ok(0.0);
        }
        let (mut n, mut d) = double_forms(&num, &den, &a, &b);
        let gcd = Integer::from(n.gcd_ref(&d));
        n /= &gcd;
        d /= &gcd;
        if d < 0 {
            n = -n;
            d = -d;
        }
        num = n;
        den = d;
        k += 1;
    }
    let base = integer_ln(&num.clone().abs()).max(integer_ln(&den));
    let mut h = base / 4f64.powi(k as i32);

    let log_r = integer_ln(&r);
    let steps = 64u32;
    let mut modulus = r.clone().pow(steps + 2);
    let mut nm = Integer::from(&num % &modulus);
    let mut dm = Integer::from(&den % &modulus);
    let fa = Float::with_val(prec, &a);
    let fb = Float::with_val(prec, &b);
    let mut fu = Float::with_val(prec, &num);
    let mut fv = Float::with_val(prec, &den);
    normalize(&mut fu, &mut fv);
    let mut bound = log_r + 1.0;
    let mut weight = 4f64.powi(-(k as i32) - 1);
    for _ in 0..steps {
        let (ff, gg) = float_forms(&fu, &fv, &fa, &fb);
        let m = if ff.clone().abs() >= gg.clone().abs() { ff.clone().abs() } else { gg.clone().abs() };
        let arch = float_ln(&m);
        let (fm, gm) = double_forms(&nm, &dm, &a, &b);
        let fm = Integer::from(&fm % &modulus);
        let gm = Integer::from(&gm % &modulus);
        let gj = Integer::from(fm.gcd_ref(&r)).gcd(&gm);
        let term = arch - integer_ln(&gj);
        h += weight * term;
        bound = bound.max(term.abs() + 1.0);
        modulus /= &gj;
        nm = Integer::from(&fm / &gj) % &modulus;
        dm = Integer::from(&gm / &gj) % &modulus;
        fu = ff;
        fv = gg;
        normalize(&mut fu, &mut fv);
        weight /= 4.0;
        if weight * bound < SERIES_TOLERANCE {
            return Ok(h.max(0.0));
        }
    }
    Err(Error::Resource("canonical height series did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_sanity() {
        // Res(x - 2, x - 5) = -3 up to sign conventions
        let r = resultant(&[Integer::from(-2), Integer::from(1)], &[Integer::from(-5), Integer::from(1)]);
        assert_eq!(r.abs(), 3);
    }

    #[test]
    fn torsion_has_zero_height() {
        let e = Curve::from_i64(0, 1).unwrap();
        assert_eq!(canonical_height(&e, &Point::from_i64(2, 3)).unwrap(), 0.0);
        let e = Curve::from_i64(-1, 0).unwrap();
        assert_eq!(canonical_height(&e, &Point::from_i64(0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn conductor_37_generator() {
        // y^2 + y = x^3 - x in short form, image of (0, 0)
        let e = Curve::new(Rational::from(-1), Rational::from((1, 4))).unwrap();
        let p = Point::Affine(Rational::new(), Rational::from((1, 2)));
        let h = canonical_height(&e, &p).unwrap();
        assert!((h - 0.0511114082).abs() < 1e-3, "{}", h);
    }

    #[test]
    fn quadratic_scaling() {
        let e = Curve::from_i64(0, 17).unwrap();
        let p = Point::from_i64(-2, 3);
        let h1 = canonical_height(&e, &p).unwrap();
        assert!(h1 > 0.1);
        for n in 2..=5u32 {
            let q = e.mul(n as i64, &p).unwrap();
            let hn = canonical_height(&e, &q).unwrap();
            assert!((hn - (n * n) as f64 * h1).abs() < 1e-5, "{} {} {}", n, hn, h1);
        }
    }

    /// Plain `4^-k log max(|p_k|, q_k)` after `k` exact doublings.
    fn naive_limit(e: &Curve<Rational>, p: &Point<Rational>, k: u32) -> f64 {
        let mut q = p.clone();
        for _ in 0..k {
            q = e.double(&q);
        }
        match q {
            Point::Affine(x, _) => weil_height(&x) / 4f64.powi(k as i32),
            Point::Infinity => 0.0,
        }
    }

    fn weil_height(x: &Rational) -> f64 {
        super::super::weil::weil_height_rational(x)
    }

    #[test]
    fn series_matches_naive_limit() {
        let cases = [(0i64, 17i64, -2i64, 3i64), (0, -2, 3, 5), (-7, 10, 1, 2)];
        for (a, b, x, y) in cases {
            let e = Curve::from_i64(a, b).unwrap();
            let p = Point::from_i64(x, y);
            let h = canonical_height(&e, &p).unwrap();
            let n = naive_limit(&e, &p, 9);
            assert!((h - n).abs() < 1e-3, "{} {}", h, n);
            let h2 = canonical_height(&e, &e.double(&p)).unwrap();
            assert!((h2 / h - 4.0).abs() < 1e-6, "{:?} {} {}", (a, b), h, h2);
            let hp = canonical_height_prec(&e, &p, 256).unwrap();
            assert!((h - hp).abs() < 1e-10);
        }
    }
}
