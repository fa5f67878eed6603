use crate::error::{Error, Result};

use super::complex::BigComplex;

/// Arithmetic-geometric mean with the "right" square-root choice at every
/// step: the geometric mean `g` is taken with `|a' - g| <= |a' + g|`, ties
/// resolved towards `Im(g / a') >= 0`.
pub fn agm(a: &BigComplex, b: &BigComplex) -> Result<BigComplex> {
    let prec = a.prec().min(b.prec());
    if a.is_zero_exact() || b.is_zero_exact() {
        return Ok(BigComplex::zero(prec));
    }
    let mut x = a.with_prec(prec);
    let mut y = b.with_prec(prec);
    let target = prec as f64 - 8.0;
    let max_iter = 4 * prec as usize;
    for _ in 0..max_iter {
        let diff = (&x - &y).log2_abs_approx();
        if diff == f64::NEG_INFINITY || x.log2_abs_approx() - diff >= target {
            return Ok(x);
        }
        let am = (&x + &y).div_int(2);
        let mut g = (&x * &y).sqrt();
        let minus = (&am - &g).abs();
        let plus = (&am + &g).abs();
        if minus > plus {
            g = -g;
        } else if minus == plus {
            let ratio = &g / &am;
            if ratio.im().is_sign_negative() {
                g = -g;
            }
        }
        x = am;
        y = g;
    }
    Err(Error::numeric(format!(
        "agm did not converge within {} iterations",
        max_iter
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_and_zero() {
        let one = BigComplex::one(256);
        assert_eq!(agm(&one, &one).unwrap(), one);
        assert!(agm(&one, &BigComplex::zero(256)).unwrap().is_zero_exact());
    }

    #[test]
    fn symmetric_and_homogeneous() {
        let a = BigComplex::from_f64(1.5, 0.25, 256);
        let b = BigComplex::from_f64(0.75, -0.5, 256);
        let k = BigComplex::from_f64(2.0, 1.0, 256);
        let m = agm(&a, &b).unwrap();
        let m2 = agm(&b, &a).unwrap();
        let m3 = agm(&(&k * &a), &(&k * &b)).unwrap();
        assert!((&m - &m2).log2_abs_approx() < -240.0);
        assert!((&(&k * &m) - &m3).log2_abs_approx() < -240.0);
    }
}
