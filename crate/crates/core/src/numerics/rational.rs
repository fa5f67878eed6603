//! Rational reconstruction of real numbers by continued fractions.

use rug::{Float, Integer, Rational};

/// Best rational approximation `p/q` with `q <= max_den`, accepted only when
/// `|x - p/q| < 1 / (2 q^2)` (so it is the unique candidate of that size).
pub fn recognize_rational(x: &Float, max_den: &Integer) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let prec = x.prec();
    let exact = x.to_rational()?;
    let mut rem = exact.clone();
    let (mut p0, mut q0) = (Integer::from(0), Integer::from(1));
    let (mut p1, mut q1) = (Integer::from(1), Integer::from(0));
    let mut best: Option<Rational> = None;
    for _ in 0..(4 * prec as usize + 8) {
        let a = rem.clone().floor().into_numer_denom().0;
        let p2 = Integer::from(&a * &p1) + &p0;
        let q2 = Integer::from(&a * &q1) + &q0;
        if q2 > *max_den {
            break;
        }
        best = Some(Rational::from((p2.clone(), q2.clone())));
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = Rational::from(&rem - &a);
        if frac == 0 {
            break;
        }
        rem = frac.recip();
    }
    let cand = best?;
    let err = Rational::from(&exact - &cand).abs();
    let q = cand.denom().clone();
    let bound = Rational::from((Integer::from(1), Integer::from(&q * &q) * 2u32));
    if err < bound {
        Some(cand)
    } else {
        None
    }
}
