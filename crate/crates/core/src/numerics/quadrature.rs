//! Tanh-sinh (double exponential) quadrature on a finite interval.
//!
//! This is the independent oracle used to cross-check AGM periods; library
//! code never depends on it.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Integrates `f` over `[a, b]`. The integrand receives `(x, x - a, b - x)`
/// with both distances computed without cancellation, so algebraic endpoint
/// singularities such as `1/sqrt(b - x)` are handled.
pub fn tanh_sinh<F>(f: F, a: &Float, b: &Float, prec: u32) -> Result<Float>
where
    F: Fn(&Float, &Float, &Float) -> Float,
{
    let work = prec + 32;
    let pi_half = Float::with_val(work, Constant::Pi) / 2u32;
    let half = Float::with_val(work, b - a) / 2u32;
    let tol_exp = -(prec as i32) + 8;

    // Node at u: v = (pi/2) sinh u, x = (a + b)/2 + half * tanh v.
    // Complement 1 - tanh v = 2 / (exp(2v) + 1) for v >= 0.
    let eval = |u: &Float| -> Float {
        let v = Float::with_val(work, u.sinh_ref()) * &pi_half;
        let av = Float::with_val(work, v.abs_ref());
        let e2 = Float::with_val(work, (av.clone() * 2u32).exp_ref());
        let comp = Float::with_val(work, 2u32) / (e2.clone() + 1u32);
        let ch = Float::with_val(work, av.cosh_ref());
        let w = Float::with_val(work, u.cosh_ref()) * &pi_half / (ch.clone() * &ch);
        let (x, da, db) = if v.is_sign_negative() {
            let da = comp.clone() * &half;
            let db = Float::with_val(work, 2u32 - comp) * &half;
            (Float::with_val(work, a + &da), da, db)
        } else {
            let db = comp.clone() * &half;
            let da = Float::with_val(work, 2u32 - comp) * &half;
            (Float::with_val(work, b - &db), da, db)
        };
        if da.is_zero() || db.is_zero() {
            return Float::new(work);
        }
        f(&x, &da, &db) * w
    };

    let mut h = Float::with_val(work, 1);
    let mut sum = eval(&Float::new(work));
    // Level 0: integer nodes.
    let mut k = 1i64;
    loop {
        let u = Float::with_val(work, k);
        let t = eval(&u) + eval(&Float::with_val(work, -&u));
        let small = t.is_zero() || t.get_exp().unwrap_or(i32::MIN) < tol_exp - 40;
        sum += t;
        if small || k > 12 {
            break;
        }
        k += 1;
    }
    let mut estimate = Float::with_val(work, &sum * &h) * &half;
    for _level in 1..20 {
        h /= 2u32;
        // New nodes are the odd multiples of h.
        let mut j = 1i64;
        loop {
            let u = Float::with_val(work, &h * j);
            if u > 12 {
                break;
            }
            let t = eval(&u) + eval(&Float::with_val(work, -&u));
            let small = t.is_zero() || t.get_exp().unwrap_or(i32::MIN) < tol_exp - 40;
            sum += t;
            if small && u > 1 {
                break;
            }
            j += 2;
        }
        let next = Float::with_val(work, &sum * &h) * &half;
        let diff = Float::with_val(work, &next - &estimate);
        estimate = next;
        let scale = estimate.get_exp().unwrap_or(0);
        if diff.is_zero() || diff.get_exp().unwrap_or(i32::MIN) < scale + tol_exp {
            return Ok(Float::with_val(prec, &estimate));
        }
    }
    Err(Error::numeric("tanh-sinh quadrature did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_integral() {
        let prec = 256;
        let a = Float::with_val(prec, 0);
        let b = Float::with_val(prec, 1);
        let v = tanh_sinh(|x, _, _| Float::with_val(prec + 32, x * x), &a, &b, prec).unwrap();
        let third = Float::with_val(prec, 1) / 3u32;
        assert!(Float::with_val(prec, &v - &third).abs() < Float::with_val(prec, Float::i_exp(1, -240)));
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 dx / sqrt(1 - x) = 2
        let prec = 256;
        let a = Float::with_val(prec, 0);
        let b = Float::with_val(prec, 1);
        let v = tanh_sinh(|_, _, db| Float::with_val(prec + 32, db.sqrt_ref()).recip(), &a, &b, prec)
            .unwrap();
        assert!(Float::with_val(prec, &v - 2u32).abs() < Float::with_val(prec, Float::i_exp(1, -240)));
    }
}
