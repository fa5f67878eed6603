//! Elliptic logarithms and Betti coordinates.

use rug::Float;

use crate::elliptic::{Curve, Point};
use crate::error::{Error, Result};
use crate::numerics::{newton_refine, BigComplex};

use super::lattice::{two_torsion_abscissas, PeriodBasis};
use super::weierstrass::{exp_map, wp_and_derivative};

/// Elliptic logarithm reduced into the fundamental parallelogram of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticLog {
    pub value: BigComplex,
    pub basis: PeriodBasis,
}

/// Real coordinates of an elliptic logarithm, reduced into `[0,1)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BettiCoord {
    pub beta1: Float,
    pub beta2: Float,
}

impl BettiCoord {
    pub fn to_f64(&self) -> (f64, f64) {
        (self.beta1.to_f64(), self.beta2.to_f64())
    }
}

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication. Arguments
/// must avoid the closed negative real axis (one of them may be zero).
pub fn carlson_rf(x: &BigComplex, y: &BigComplex, z: &BigComplex) -> Result<BigComplex> {
    let prec = x.prec().min(y.prec()).min(z.prec());
    let work = prec + 16;
    let (mut x, mut y, mut z) = (x.with_prec(work), y.with_prec(work), z.with_prec(work));
    let zeros = [&x, &y, &z].iter().filter(|v| v.is_zero_exact()).count();
    if zeros > 1 {
        return Err(Error::domain("R_F with two zero arguments diverges"));
    }
    let target = -((work + 12) as f64) / 6.0;
    for _ in 0..(2 * work as usize) {
        let a = (&(&x + &y) + &z).div_int(3);
        let la = a.log2_abs_approx();
        let dev = [&x, &y, &z]
            .iter()
            .map(|v| (&a - *v).log2_abs_approx() - la)
            .fold(f64::NEG_INFINITY, f64::max);
        if dev < target {
            let dx = &(&a - &x) / &a;
            let dy = &(&a - &y) / &a;
            let dz = -(&dx + &dy);
            let e2 = &(&dx * &dy) - &(&dz * &dz);
            let e3 = &(&dx * &dy) * &dz;
            let one = BigComplex::one(work);
            let s = &(&(&(&one - &e2.div_int(10)) + &e3.div_int(14)) + &(&e2 * &e2).div_int(24))
                - &(&e2 * &e3).mul_int(3).div_int(44);
            return Ok((&s / &a.sqrt()).with_prec(prec));
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = &(&(&sx * &sy) + &(&sx * &sz)) + &(&sy * &sz);
        x = (&x + &lam).div_int(4);
        y = (&y + &lam).div_int(4);
        z = (&z + &lam).div_int(4);
    }
    Err(Error::numeric("R_F duplication did not converge"))
}

/// True if `v` lies within a small sector around the negative real axis.
fn near_negative_axis(v: &BigComplex) -> bool {
    if v.is_zero_exact() {
        return false;
    }
    let (re, im) = (v.re_f64(), v.im_f64());
    re < 0.0 && im.abs() <= 0.5 * re.abs()
}

/// `int_x^inf dt / sqrt((t-e1)(t-e2)(t-e3))` along a ray leaving `x` in a
/// direction that keeps the integrand analytic; defined up to sign.
fn tail_integral(x: &BigComplex, roots: &[BigComplex]) -> Result<BigComplex> {
    let prec = x.prec();
    let dirs = [
        BigComplex::one(prec),
        BigComplex::i(prec),
        -BigComplex::i(prec),
        -BigComplex::one(prec),
    ];
    for d in dirs.iter() {
        let args: Vec<BigComplex> = roots.iter().map(|e| &(x - e) / d).collect();
        if args.iter().any(near_negative_axis) {
            continue;
        }
        let rf = carlson_rf(&args[0], &args[1], &args[2])?;
        return Ok(&rf.mul_int(2) / &d.sqrt());
    }
    Err(Error::numeric("no admissible integration ray for elliptic logarithm"))
}

/// Elliptic logarithm of `p` by Carlson's duplication, with the sign fixed
/// against the exponential map.
pub fn elliptic_log(e: &Curve<BigComplex>, p: &Point<BigComplex>, basis: &PeriodBasis) -> Result<EllipticLog> {
    let prec = basis.prec();
    let (x, y) = match p {
        Point::Infinity => {
            return Ok(EllipticLog {
                value: BigComplex::zero(prec),
                basis: basis.clone(),
            })
        }
        Point::Affine(x, y) => (x.with_prec(prec + 16), y.with_prec(prec + 16)),
    };
    if !e.contains(p) {
        return Err(Error::domain("elliptic_log of a point not on the curve"));
    }
    let roots = two_torsion_abscissas(e, prec + 16)?;
    let z = tail_integral(&x, &roots)?.with_prec(prec);
    let z = basis.reduce_min(&z)?;
    let value = if y.log2_abs_approx() < -(prec as f64) / 2.0 {
        z
    } else {
        let (_, wpd) = wp_and_derivative(&z, basis)?;
        let yz = wpd.mul_int(4);
        if (&yz - &y).abs() <= (&yz + &y).abs() {
            z
        } else {
            -z
        }
    };
    Ok(EllipticLog {
        value: basis.reduce_mod(&value)?,
        basis: basis.clone(),
    })
}

/// Independent route: Newton inversion of the q-series exponential from
/// the best point of a coarse grid over the fundamental parallelogram.
pub fn elliptic_log_by_inversion(e: &Curve<BigComplex>, p: &Point<BigComplex>, basis: &PeriodBasis) -> Result<EllipticLog> {
    let prec = basis.prec();
    let (x, y) = match p {
        Point::Infinity => {
            return Ok(EllipticLog {
                value: BigComplex::zero(prec),
                basis: basis.clone(),
            })
        }
        Point::Affine(x, y) => (x.clone(), y.clone()),
    };
    if !e.contains(p) {
        return Err(Error::domain("elliptic_log of a point not on the curve"));
    }
    let coarse = basis.with_prec(64);
    let grid = 24;
    let mut best: Option<(f64, BigComplex)> = None;
    for i in 0..grid {
        for j in 0..grid {
            let s = (i as f64 + 0.5) / grid as f64;
            let t = (j as f64 + 0.5) / grid as f64;
            let z = &coarse.omega1.scale_real(&Float::with_val(64, s))
                + &coarse.omega2.scale_real(&Float::with_val(64, t));
            if let Ok(Point::Affine(px, py)) = exp_map(&z, &coarse) {
                let d = (&px - &x.with_prec(64)).abs_f64() + (&py - &y.with_prec(64)).abs_f64();
                if best.as_ref().map_or(true, |b| d < b.0) {
                    best = Some((d, z));
                }
            }
        }
    }
    let start = best.ok_or_else(|| Error::numeric("grid search failed"))?.1.with_prec(prec);
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) * 3 / 4))
        * Float::with_val(prec, x.abs() + 1u32);
    let z = newton_refine(
        |z| {
            let (wp, wpd) = wp_and_derivative(z, basis)?;
            Ok((&wp.mul_int(4) - &x, wpd.mul_int(4)))
        },
        &start,
        &tol,
    )?;
    let (_, wpd) = wp_and_derivative(&z, basis)?;
    let yz = wpd.mul_int(4);
    let z = if (&yz - &y).abs() <= (&yz + &y).abs() { z } else { -z };
    Ok(EllipticLog {
        value: basis.reduce_mod(&z)?,
        basis: basis.clone(),
    })
}

/// Solve `l = b1 omega1 + b2 omega2` and reduce into `[0,1)^2`.
pub fn betti_coords(l: &EllipticLog) -> Result<BettiCoord> {
    let (b1, b2) = l.basis.coordinates(&l.value)?;
    let frac = |b: Float| {
        let f = Float::with_val(b.prec(), b.floor_ref());
        let mut r = b - f;
        if r >= 1 {
            r -= 1u32;
        }
        if r < 0 {
            r = Float::with_val(r.prec(), 0);
        }
        r
    };
    Ok(BettiCoord {
        beta1: frac(b1),
        beta2: frac(b2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::point_to_complex;
    use crate::periods::lattice::period_lattice;

    fn setup(a: i64, b: i64, prec: u32) -> (Curve<rug::Rational>, Curve<BigComplex>, PeriodBasis) {
        let e = Curve::from_i64(a, b).unwrap();
        let ec = e.to_complex(prec);
        let basis = period_lattice(&ec, prec).unwrap();
        (e, ec, basis)
    }

    #[test]
    fn rf_known_value() {
        // R_F(0, 1, 2) = 1.3110287771460599052...
        let v = carlson_rf(&BigComplex::zero(128), &BigComplex::one(128), &BigComplex::from_i64(2, 128)).unwrap();
        assert!((v.re_f64() - 1.3110287771460599).abs() < 1e-15);
    }

    #[test]
    fn infinity_and_two_torsion() {
        let (_, ec, basis) = setup(-1, 0, 192);
        let l = elliptic_log(&ec, &Point::Infinity, &basis).unwrap();
        assert!(l.value.is_zero_exact());
        let half = point_to_complex(&Point::from_i64(1, 0), 192);
        let b = betti_coords(&elliptic_log(&ec, &half, &basis).unwrap()).unwrap();
        let (b1, b2) = b.to_f64();
        assert!([(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
            .iter()
            .any(|(u, v)| (b1 - u).abs() < 1e-40 && (b2 - v).abs() < 1e-40));
    }

    #[test]
    fn two_routes_agree_and_exp_inverts() {
        let (e, ec, basis) = setup(0, 1, 192);
        for p in [Point::from_i64(2, 3), Point::from_i64(2, -3), Point::from_i64(0, 1)] {
            let pc = point_to_complex(&p, 192);
            let l1 = elliptic_log(&ec, &pc, &basis).unwrap();
            let l2 = elliptic_log_by_inversion(&ec, &pc, &basis).unwrap();
            let d = basis.reduce_min(&(&l1.value - &l2.value)).unwrap();
            assert!(d.log2_abs_approx() < -120.0);
            let back = exp_map(&l1.value, &basis).unwrap();
            assert!((back.x().unwrap() - pc.x().unwrap()).log2_abs_approx() < -120.0);
            assert!((back.y().unwrap() - pc.y().unwrap()).log2_abs_approx() < -120.0);
        }
        let _ = e;
    }

    #[test]
    fn log_is_additive_under_multiplication() {
        let (e, ec, basis) = setup(-2, 5, 192);
        let p = Point::from_i64(1, 2);
        let l = elliptic_log(&ec, &point_to_complex(&p, 192), &basis).unwrap();
        for n in 2..=8 {
            let q = e.mul(n, &p).unwrap();
            let lq = elliptic_log(&ec, &point_to_complex(&q, 192), &basis).unwrap();
            let d = basis.reduce_min(&(&lq.value - &l.value.mul_int(n))).unwrap();
            assert!(d.log2_abs_approx() < -100.0, "n = {}", n);
        }
    }

    #[test]
    fn betti_of_half_periods() {
        let (_, _, basis) = setup(1, 1, 128);
        let l = EllipticLog {
            value: (&basis.omega1 + &basis.omega2).div_int(2),
            basis: basis.clone(),
        };
        let (b1, b2) = betti_coords(&l).unwrap().to_f64();
        assert!((b1 - 0.5).abs() < 1e-30 && (b2 - 0.5).abs() < 1e-30);
        let zero = EllipticLog {
            value: BigComplex::zero(128),
            basis,
        };
        assert_eq!(betti_coords(&zero).unwrap().to_f64(), (0.0, 0.0));
    }
}
