//! Period lattices of `dx/y` via the complex AGM, with Gauss reduction.

use std::cmp::Ordering;

use rug::Float;

use crate::elliptic::Curve;
use crate::error::{Error, Result};
use crate::numerics::{agm, negligible, poly_roots, BigComplex, Field, Poly};

/// Ordered period pair with `Im(omega2 / omega1) > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodBasis {
    pub omega1: BigComplex,
    pub omega2: BigComplex,
}

impl PeriodBasis {
    pub fn new(omega1: BigComplex, omega2: BigComplex) -> Result<Self> {
        let b = PeriodBasis { omega1, omega2 };
        if b.omega1.is_zero_exact() || !b.det().is_sign_positive() || b.det().is_zero() {
            return Err(Error::domain("degenerate or negatively oriented period basis"));
        }
        Ok(b)
    }

    pub fn prec(&self) -> u32 {
        self.omega1.prec().min(self.omega2.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        PeriodBasis {
            omega1: self.omega1.with_prec(prec),
            omega2: self.omega2.with_prec(prec),
        }
    }

    pub fn tau(&self) -> BigComplex {
        &self.omega2 / &self.omega1
    }

    /// `Im(conj(omega1) omega2)`, the oriented covolume.
    pub fn det(&self) -> Float {
        let p = self.prec();
        let a = Float::with_val(p, self.omega1.re() * self.omega2.im());
        let b = Float::with_val(p, self.omega2.re() * self.omega1.im());
        a - b
    }

    /// `m omega1 + n omega2`.
    pub fn combine(&self, m: i64, n: i64) -> BigComplex {
        &self.omega1.mul_int(m) + &self.omega2.mul_int(n)
    }

    /// Real coordinates `(b1, b2)` with `z = b1 omega1 + b2 omega2`.
    pub fn coordinates(&self, z: &BigComplex) -> Result<(Float, Float)> {
        let p = self.prec().min(z.prec());
        let det = self.det();
        if det.is_zero() {
            return Err(Error::domain("degenerate period basis"));
        }
        let (r1, i1) = (self.omega1.re(), self.omega1.im());
        let (r2, i2) = (self.omega2.re(), self.omega2.im());
        let b1 = Float::with_val(p, z.re() * i2) - Float::with_val(p, r2 * z.im());
        let b2 = Float::with_val(p, r1 * z.im()) - Float::with_val(p, i1 * z.re());
        Ok((b1 / &det, b2 / &det))
    }

    /// Lattice vector closest to `z` together with its integer coordinates.
    /// Exact for reduced bases; otherwise a 3x3 neighbourhood search.
    pub fn nearest_vector(&self, z: &BigComplex) -> Result<(i64, i64, BigComplex)> {
        let (b1, b2) = self.coordinates(z)?;
        let m0 = float_round_i64(&b1)?;
        let n0 = float_round_i64(&b2)?;
        let mut best: Option<(i64, i64, BigComplex, Float)> = None;
        for dm in -1..=1 {
            for dn in -1..=1 {
                let v = self.combine(m0 + dm, n0 + dn);
                let d = z.dist(&v);
                if best.as_ref().map_or(true, |b| d < b.3) {
                    best = Some((m0 + dm, n0 + dn, v, d));
                }
            }
        }
        let (m, n, v, _) = best.unwrap();
        Ok((m, n, v))
    }

    /// Representative of `z` in the half-open parallelogram `[0,1)^2`.
    pub fn reduce_mod(&self, z: &BigComplex) -> Result<BigComplex> {
        let (b1, b2) = self.coordinates(z)?;
        let m = float_floor_i64(&b1)?;
        let n = float_floor_i64(&b2)?;
        Ok(z - &self.combine(m, n))
    }

    /// Representative of `z` of minimal modulus.
    pub fn reduce_min(&self, z: &BigComplex) -> Result<BigComplex> {
        let (_, _, v) = self.nearest_vector(z)?;
        Ok(z - &v)
    }

    /// Length of the shortest nonzero vector (assumes a reduced basis).
    pub fn min_norm(&self) -> Float {
        self.omega1.abs().min(&self.omega2.abs()).clone()
    }

    /// Gauss-reduced basis: `|omega1|` minimal, `tau` in the standard
    /// fundamental domain with `Re tau` in `(-1/2, 1/2]` and `Re tau >= 0`
    /// on the unit circle, and `omega1` pointing into the right half plane.
    pub fn reduced(&self) -> Result<PeriodBasis> {
        let prec = self.prec();
        let tol = tolerance(prec);
        let (mut w1, mut w2) = (self.omega1.clone(), self.omega2.clone());
        for _ in 0..(4 * prec as usize + 64) {
            if w2.abs() < w1.abs() {
                std::mem::swap(&mut w1, &mut w2);
            }
            let r = (&w2 / &w1).re().clone();
            let m = float_round_i64(&r)?;
            if m == 0 {
                break;
            }
            w2 = &w2 - &w1.mul_int(m);
        }
        if (&w2 / &w1).im().is_sign_negative() {
            w2 = -w2;
        }
        let half = Float::with_val(prec, 0.5);
        let tau = &w2 / &w1;
        if *tau.re() > Float::with_val(prec, &half + &tol) {
            w2 = &w2 - &w1;
        } else if *tau.re() <= Float::with_val(prec, &tol - &half) {
            w2 = &w2 + &w1;
        }
        let tau = &w2 / &w1;
        let on_circle = Float::with_val(prec, tau.abs() - 1u32).abs() <= tol;
        if on_circle && *tau.re() < Float::with_val(prec, -&tol) {
            let old1 = w1.clone();
            w1 = w2;
            w2 = -old1;
        }
        // Square and hexagonal lattices: pick the rotation of the basis with
        // omega1 of largest real part (ties towards positive imaginary part).
        let tau = &w2 / &w1;
        let on_circle = Float::with_val(prec, tau.abs() - 1u32).abs() <= tol;
        let cycle: Vec<BigComplex> = if on_circle && tau.re().clone().abs() <= tol {
            vec![w1.clone(), w2.clone(), -w1.clone(), -w2.clone()]
        } else if on_circle && Float::with_val(prec, tau.re() - &half).abs() <= tol {
            let d = &w2 - &w1;
            vec![w1.clone(), w2.clone(), d.clone(), -w1.clone(), -w2.clone(), -d]
        } else {
            let re_small = w1.re().clone().abs() <= Float::with_val(prec, &tol * w1.abs());
            let flip = if re_small {
                w1.im().is_sign_negative()
            } else {
                w1.re().is_sign_negative()
            };
            if flip {
                vec![-w1.clone(), -w2.clone()]
            } else {
                vec![w1.clone(), w2.clone()]
            }
        };
        if cycle.len() > 2 {
            let scale = Float::with_val(prec, &tol * w1.abs());
            let mut k = 0;
            for j in 1..cycle.len() {
                let diff = Float::with_val(prec, cycle[j].re() - cycle[k].re());
                if diff > scale || (diff.clone().abs() <= scale && cycle[j].im() > cycle[k].im()) {
                    k = j;
                }
            }
            w1 = cycle[k].clone();
            w2 = cycle[(k + 1) % cycle.len()].clone();
        } else {
            w1 = cycle[0].clone();
            w2 = cycle[1].clone();
        }
        PeriodBasis::new(w1, w2)
    }

    /// Integer matrix `M` with `(other.omega1, other.omega2)^T = M (self ...)^T`,
    /// provided `other` spans the same lattice.
    pub fn change_of_basis(&self, other: &PeriodBasis) -> Result<[[i64; 2]; 2]> {
        let tol = Float::with_val(self.prec(), self.min_norm() * tolerance(self.prec()));
        let mut rows = [[0i64; 2]; 2];
        for (k, w) in [&other.omega1, &other.omega2].into_iter().enumerate() {
            let (m, n, v) = self.nearest_vector(w)?;
            if w.dist(&v) > tol {
                return Err(Error::numeric("bases span different lattices"));
            }
            rows[k] = [m, n];
        }
        Ok(rows)
    }
}

fn tolerance(prec: u32) -> Float {
    Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2))
}

pub(crate) fn float_round_i64(f: &Float) -> Result<i64> {
    f.to_integer()
        .and_then(|i| i.to_i64())
        .ok_or_else(|| Error::numeric("lattice coordinate out of range"))
}

pub(crate) fn float_floor_i64(f: &Float) -> Result<i64> {
    Float::with_val(f.prec(), f.floor_ref())
        .to_integer()
        .and_then(|i| i.to_i64())
        .ok_or_else(|| Error::numeric("lattice coordinate out of range"))
}

/// Roots of `x^3 + a x + b`, sorted by (Re, Im).
pub fn two_torsion_abscissas(e: &Curve<BigComplex>, prec: u32) -> Result<Vec<BigComplex>> {
    let one = BigComplex::one(prec);
    let p = Poly::new(vec![e.b().with_prec(prec), e.a().with_prec(prec), BigComplex::zero(prec), one]);
    poly_roots(&p, prec)
}

/// Reduced period basis of the differential `dx/y` on `e`.
pub fn period_lattice(e: &Curve<BigComplex>, precision: u32) -> Result<PeriodBasis> {
    let work = precision + 32;
    let disc = e.discriminant().with_prec(work);
    let scale = (3.0 * e.a().log2_abs()).max(2.0 * e.b().log2_abs()).max(0.0) + 9.0;
    if negligible(&disc, scale, 0.5) {
        return Err(Error::domain("period lattice of a (nearly) singular curve"));
    }
    let roots = two_torsion_abscissas(e, work)?;
    let (e1, e2, e3) = (&roots[0], &roots[1], &roots[2]);
    let a = (e1 - e3).sqrt();
    let mut b = (e1 - e2).sqrt();
    if (&a - &b).abs() > (&a + &b).abs() {
        b = -b;
    }
    let mut c = (e2 - e3).sqrt();
    let ib = b.mul_i();
    if (&c - &ib).abs() > (&c + &ib).abs() {
        c = -c;
    }
    let two_pi = BigComplex::from_real(&(BigComplex::pi(work) * 2u32));
    let w1 = &two_pi / &agm(&a, &b)?;
    let w2 = &two_pi / &agm(&c, &ib)?;
    let (w1, w2) = match (&w2 / &w1).im().cmp0() {
        Some(Ordering::Greater) => (w1, w2),
        Some(Ordering::Less) => (w1, -w2),
        _ => return Err(Error::numeric("AGM periods are collinear")),
    };
    let basis = PeriodBasis::new(w1, w2)?.reduced()?;
    Ok(basis.with_prec(precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Curve;

    fn curve(a: i64, b: i64, prec: u32) -> Curve<BigComplex> {
        Curve::from_i64(a, b).unwrap().to_complex(prec)
    }

    #[test]
    fn square_and_hexagonal() {
        let b = period_lattice(&curve(-1, 0, 256), 256).unwrap();
        let tau = b.tau();
        assert!((&tau - &BigComplex::i(256)).log2_abs_approx() < -200.0);
        // real period 2 pi / agm(1, sqrt 2)
        assert!((b.omega1.re_f64() - 5.244115108584239).abs() < 1e-12);
        let b = period_lattice(&curve(0, 1, 256), 256).unwrap();
        let rho = BigComplex::from_f64(0.5, 0.0, 256) + BigComplex::from_real(&(Float::with_val(256, 3).sqrt() / 2u32)).mul_i();
        assert!((&b.tau() - &rho).log2_abs_approx() < -200.0);
    }

    #[test]
    fn singular_rejected() {
        let e = Curve::new(BigComplex::zero(128), BigComplex::zero(128));
        assert!(e.is_err());
    }

    #[test]
    fn coordinates_and_reduction() {
        let b = period_lattice(&curve(1, 1, 128), 128).unwrap();
        let z = &b.combine(3, -2) + &(&b.omega1 + &b.omega2).div_int(2);
        let r = b.reduce_mod(&z).unwrap();
        let (c1, c2) = b.coordinates(&r).unwrap();
        assert!((c1.to_f64() - 0.5).abs() < 1e-30 && (c2.to_f64() - 0.5).abs() < 1e-30);
        let m = b.change_of_basis(&PeriodBasis::new(b.combine(1, 1), b.combine(0, 1)).unwrap()).unwrap();
        assert_eq!(m, [[1, 1], [0, 1]]);
    }
}
