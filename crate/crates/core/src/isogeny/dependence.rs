use rug::Rational;
use serde::Serialize;

use crate::elliptic::{CurveFamily, Point};
use crate::error::{Error, Result};
use crate::numerics::{BigComplex, RatFunc};
use crate::periods::{elliptic_log, period_lattice, PeriodBasis};

use super::modpoly::{modular_poly, relative_residual};

/// Section given by its abscissa `x(t)`; the ordinate lives on the double
/// cover `y^2 = x^3 + a x + b` and is taken on the principal square-root branch.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverSection {
    pub label: String,
    pub x: RatFunc,
}

impl CoverSection {
    pub fn new(label: impl Into<String>, x: RatFunc) -> Self {
        CoverSection { label: label.into(), x }
    }

    /// Legendre abscissa `-1`, i.e. `x = -(t + 4)/3` on the short model of
    /// [`CurveFamily::legendre`].
    pub fn legendre_default() -> Self {
        let x = crate::numerics::Poly::from_i64s(&[-4, -1]).scale(&Rational::from((1, 3)));
        CoverSection::new("legendre x=-1", RatFunc::from_poly(x))
    }

    pub fn point_at(&self, family: &CurveFamily, t: &BigComplex) -> Result<Point<BigComplex>> {
        let e = family.fiber_complex(t)?;
        let x = self.x.eval_complex(t);
        if !x.is_finite() {
            return Err(Error::domain("section has a pole at this parameter"));
        }
        let y = e.rhs(&x).sqrt();
        Ok(Point::Affine(x, y))
    }
}

/// Search request at a locus point.
#[derive(Clone, Debug)]
pub struct DependenceQuery {
    pub t: BigComplex,
    pub u: BigComplex,
    /// Search box `|a|, |b| <= bound`.
    pub bound: i64,
    pub level: u32,
}

/// `a xi l(t) = b l(u)` modulo the lattice at `u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Relation {
    pub a: i64,
    pub b: i64,
    pub xi: (String, String),
    /// Distance of the lattice coordinates from integers.
    pub residual: f64,
}

type Mat = [[i64; 2]; 2];

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    let mut r = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    r
}

fn mobius(g: &Mat, z: &BigComplex) -> BigComplex {
    let p = z.prec();
    let n = &z.mul_int(g[0][0]) + &BigComplex::from_i64(g[0][1], p);
    let d = &z.mul_int(g[1][0]) + &BigComplex::from_i64(g[1][1], p);
    &n / &d
}

/// `F = M tau` with `F` in the standard fundamental domain and `M` in SL2(Z).
fn reduce_tau(tau: &BigComplex) -> Result<(BigComplex, Mat)> {
    let mut z = tau.clone();
    let mut m: Mat = [[1, 0], [0, 1]];
    for _ in 0..10_000 {
        let k = z.re_f64().round() as i64;
        if k != 0 {
            z = &z - &BigComplex::from_i64(k, z.prec());
            m = mat_mul(&[[1, -k], [0, 1]], &m);
        }
        if z.abs_f64() < 1.0 - 1e-12 {
            z = -z.recip_fast();
            m = mat_mul(&[[0, -1], [1, 0]], &m);
        } else {
            return Ok((z, m));
        }
    }
    Err(Error::numeric("modular reduction did not terminate"))
}

/// Upper-triangular integer matrices of determinant `n`.
fn hermite_forms(n: u32) -> Vec<Mat> {
    let n = n as i64;
    let mut out = vec![];
    for a in 1..=n {
        if n % a != 0 {
            continue;
        }
        let d = n / a;
        for b in 0..d {
            out.push([[a, b], [0, d]]);
        }
    }
    out
}

/// Scalar `xi` with `xi Lt` a sublattice of index `n` in `Lu`, i.e. the
/// analytic form of a cyclic or non-cyclic degree-`n` isogeny.
pub fn isogeny_scalar(lt: &PeriodBasis, lu: &PeriodBasis, n: u32) -> Result<BigComplex> {
    let prec = lt.prec().min(lu.prec());
    let tol = (-(prec as f64) / 3.0).exp2();
    let (ft, mt) = reduce_tau(&lt.tau())?;
    let tu = lu.tau();
    let edges: [Mat; 4] = [[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[1, -1], [0, 1]], [[0, -1], [1, 0]]];
    for h in hermite_forms(n) {
        let (fw, mw) = reduce_tau(&mobius(&h, &tu))?;
        for e in &edges {
            if mobius(e, &fw).dist(&ft).to_f64() > tol {
                continue;
            }
            let mt_inv = [[mt[1][1], -mt[0][1]], [-mt[1][0], mt[0][0]]];
            let g = mat_mul(&mat_mul(&mat_mul(&mt_inv, e), &mw), &h);
            let xi = &(&lu.omega1.mul_int(g[1][1]) + &lu.omega2.mul_int(g[1][0])) / &lt.omega1;
            let check = &lu.omega1.mul_int(g[0][1]) + &lu.omega2.mul_int(g[0][0]);
            let w2 = &xi * &lt.omega2;
            if w2.dist(&check).to_f64() <= tol * (1.0 + check.abs_f64()) {
                return Ok(xi);
            }
        }
    }
    Err(Error::domain(format!("no degree-{} isogeny between the period lattices", n)))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// First primitive `(a, b)` in `(|a| + |b|, a, b)` order, `a >= 1`, with
/// `a xi l(t) - b l(u)` in the lattice at `u`. `None` only means no relation
/// inside the box.
pub fn dependence_search(
    family: &CurveFamily,
    s: &CoverSection,
    q: &DependenceQuery,
    prec: u32,
) -> Result<Option<Relation>> {
    if q.bound < 1 {
        return Err(Error::domain("search box must be at least 1"));
    }
    let t = q.t.with_prec(prec);
    let u = q.u.with_prec(prec);
    let et = family.fiber_complex(&t)?;
    let eu = family.fiber_complex(&u)?;
    let (jt, ju) = (et.j_invariant()?, eu.j_invariant()?);
    let on_locus = if q.level == 1 {
        jt.dist(&ju).to_f64() <= (-(prec as f64) / 4.0).exp2() * (1.0 + jt.abs_f64())
    } else {
        relative_residual(&modular_poly(q.level)?, &jt, &ju) < -(prec as f64) / 4.0
    };
    if !on_locus {
        return Err(Error::domain(format!("(t, u) is not on the level-{} isogeny locus", q.level)));
    }
    let lt = period_lattice(&et, prec)?;
    let lu = period_lattice(&eu, prec)?;
    let xi = isogeny_scalar(&lt, &lu, q.level)?;
    let zt = &xi * &elliptic_log(&et, &s.point_at(family, &t)?, &lt)?.value;
    let zu = elliptic_log(&eu, &s.point_at(family, &u)?, &lu)?.value;
    let tol = (-(prec as f64) / 3.0).exp2();
    for total in 2..=2 * q.bound {
        for a in 1..=q.bound.min(total - 1) {
            let babs = total - a;
            if babs > q.bound || gcd(a, babs) != 1 {
                continue;
            }
            for b in [-babs, babs] {
                let z = &zt.mul_int(a) - &zu.mul_int(b);
                let (c1, c2) = lu.coordinates(&z)?;
                let r = [c1, c2]
                    .iter()
                    .map(|c| {
                        let f = c.to_f64();
                        (f - f.round()).abs()
                    })
                    .fold(0.0, f64::max);
                if r < tol {
                    return Ok(Some(Relation { a, b, xi: xi.to_decimal_pair(), residual: r }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_gives_identity_relation() {
        let fam = CurveFamily::legendre();
        let s = CoverSection::legendre_default();
        let t = BigComplex::from_f64(0.3, 0.8, 128);
        let q = DependenceQuery { t: t.clone(), u: t, bound: 5, level: 1 };
        let r = dependence_search(&fam, &s, &q, 128).unwrap().unwrap();
        assert_eq!((r.a, r.b), (1, 1));
    }

    #[test]
    fn off_locus_is_rejected() {
        let fam = CurveFamily::legendre();
        let s = CoverSection::legendre_default();
        let q = DependenceQuery {
            t: BigComplex::from_f64(0.3, 0.8, 128),
            u: BigComplex::from_f64(-1.7, 0.2, 128),
            bound: 3,
            level: 2,
        };
        assert!(dependence_search(&fam, &s, &q, 128).is_err());
    }

    #[test]
    fn scalar_for_multiplication_by_two_lattice() {
        // Lu = Lt: the degree-4 endomorphism [2] gives xi = +-2.
        let b = PeriodBasis::new(BigComplex::from_f64(1.0, 0.0, 128), BigComplex::from_f64(0.31, 1.7, 128)).unwrap();
        let xi = isogeny_scalar(&b, &b, 4).unwrap();
        assert!((xi.abs_f64() - 2.0).abs() < 1e-20);
        assert!(isogeny_scalar(&b, &b, 1).unwrap().dist(&BigComplex::one(128)).to_f64() < 1e-20);
    }
}
