//! Reduction of a plane cubic with a marked point to short Weierstrass form.
//!
//! Coordinates `(X, Y, Z)` are chosen so that the projection centre `P` is
//! `(0:0:1)` and the marked point `O` lies on the line `Y = 0`. Projecting
//! from `P` gives `v^2 = D(u, 1)` with `D = f2^2 - 4 f1 f3`, where the cubic is
//! `f1 Z^2 + f2 Z + f3`; `O` sits over a root of `D`, which is moved to
//! infinity. `P` is the third point of the tangent at `O`, or `O` itself when
//! `O` is a flex.

use crate::elliptic::{Curve, Point};
use crate::error::{Error, Result};
use crate::numerics::{negligible, Field};

use super::form::Form;

pub type Vec3<F> = [F; 3];

pub fn det3<F: Field>(m: &[Vec3<F>; 3]) -> F {
    let t = |a: &F, b: &F, c: &F, d: &F| a.mul_ref(d).sub_ref(&b.mul_ref(c));
    let c0 = t(&m[1][1], &m[1][2], &m[2][1], &m[2][2]);
    let c1 = t(&m[1][0], &m[1][2], &m[2][0], &m[2][2]);
    let c2 = t(&m[1][0], &m[1][1], &m[2][0], &m[2][1]);
    m[0][0].mul_ref(&c0).sub_ref(&m[0][1].mul_ref(&c1)).add_ref(&m[0][2].mul_ref(&c2))
}

/// Inverse of a 3x3 matrix (rows), by the adjugate.
pub fn inv3<F: Field>(m: &[Vec3<F>; 3]) -> Result<[Vec3<F>; 3]> {
    let d = det3(m);
    if d.is_zero() {
        return Err(Error::numeric("singular 3x3 matrix"));
    }
    let di = d.inv_ref();
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0].mul_ref(&m[r1][c1]).sub_ref(&m[r0][c1].mul_ref(&m[r1][c0]));
    let adj = [
        [cof(1, 2, 1, 2), cof(0, 2, 1, 2).neg_ref(), cof(0, 1, 1, 2)],
        [cof(1, 2, 0, 2).neg_ref(), cof(0, 2, 0, 2), cof(0, 1, 0, 2).neg_ref()],
        [cof(1, 2, 0, 1), cof(0, 2, 0, 1).neg_ref(), cof(0, 1, 0, 1)],
    ];
    Ok(adj.map(|r| r.map(|c| c.mul_ref(&di))))
}

pub fn mat_vec<F: Field>(m: &[Vec3<F>; 3], v: &Vec3<F>) -> Vec3<F> {
    std::array::from_fn(|i| m[i][0].mul_ref(&v[0]).add_ref(&m[i][1].mul_ref(&v[1])).add_ref(&m[i][2].mul_ref(&v[2])))
}

pub fn cross<F: Field>(a: &Vec3<F>, b: &Vec3<F>) -> Vec3<F> {
    [
        a[1].mul_ref(&b[2]).sub_ref(&a[2].mul_ref(&b[1])),
        a[2].mul_ref(&b[0]).sub_ref(&a[0].mul_ref(&b[2])),
        a[0].mul_ref(&b[1]).sub_ref(&a[1].mul_ref(&b[0])),
    ]
}

pub fn max_log2<F: Field>(v: &[F]) -> f64 {
    v.iter().map(|c| c.log2_abs()).fold(f64::NEG_INFINITY, f64::max)
}

/// Entry of largest magnitude (the first nonzero one in exact fields).
pub fn max_elem<F: Field>(v: &[F]) -> F {
    let i = pick(v).unwrap_or(0);
    v[i].clone()
}

/// Index of the candidate with the largest score: the first nonzero one in
/// exact fields.
pub fn pick<F: Field>(scores: &[F]) -> Option<usize> {
    match scores.first()?.precision() {
        None => scores.iter().position(|s| !s.is_zero()),
        Some(_) => {
            let (i, best) = scores
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.log2_abs()))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == f64::NEG_INFINITY {
                None
            } else {
                Some(i)
            }
        }
    }
}

fn unit<F: Field>(like: &F, k: usize) -> Vec3<F> {
    std::array::from_fn(|i| if i == k { like.one_like() } else { like.zero_like() })
}

/// Weierstrass model of a plane cubic with marked point, with the coordinate
/// transports in both directions.
#[derive(Clone, Debug)]
pub struct CubicReduction<F> {
    curve: Curve<F>,
    /// Columns `E1, E2, E3`: plane coordinates of the basis vectors.
    basis: [Vec3<F>; 3],
    basis_inv: [Vec3<F>; 3],
    flex: bool,
    f1: Form<F>,
    f2: Form<F>,
    f3: Form<F>,
    d: [F; 5],
}

impl<F: Field> CubicReduction<F> {
    pub fn new(cubic: &Form<F>, base: &Vec3<F>) -> Result<Self> {
        let like = &base[0];
        let coef_scale = max_log2(&cubic.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>());
        let g: Vec3<F> = cubic.gradient(base).try_into().unwrap();
        let gscale = coef_scale + 2.0 * max_log2(base) + 2.0;
        if g.iter().all(|c| negligible(c, gscale, 0.5)) {
            return Err(Error::SingularFiber("marked point is singular on the cubic".into()));
        }
        // Tangent direction: orthogonal to the gradient and independent of O.
        let cands: Vec<Vec3<F>> = (0..3).map(|k| cross(&g, &unit(like, k))).collect();
        let indep: Vec<F> = cands
            .iter()
            .map(|dv| {
                let m = max_elem(dv);
                if m.is_zero() {
                    m
                } else {
                    max_elem(&cross(dv, base)).div_ref(&m)
                }
            })
            .collect();
        let k = pick(&indep).ok_or_else(|| Error::numeric("no tangent direction at the marked point"))?;
        let dir = cands[k].clone();

        // C(rho O + r D) = r^2 (q2 rho + q3 r)
        let line: Vec<Form<F>> = (0..3).map(|i| Form::linear(&[base[i].clone(), dir[i].clone()])).collect();
        let restricted = cubic.substitute(&line);
        let zero = like.zero_like();
        let q2 = restricted.coeff(&[1, 2]).cloned().unwrap_or_else(|| zero.clone());
        let q3 = restricted.coeff(&[0, 3]).cloned().unwrap_or_else(|| zero.clone());
        let qscale = coef_scale + 3.0 * max_log2(base).max(max_log2(&dir)) + 2.0;
        let flex = negligible(&q2, qscale, 0.5);

        let (e1, e3) = if flex {
            (dir.clone(), base.clone())
        } else {
            let p: Vec3<F> = std::array::from_fn(|i| q3.mul_ref(&base[i]).sub_ref(&q2.mul_ref(&dir[i])));
            (base.clone(), p)
        };
        let dets: Vec<F> = (0..3)
            .map(|k| {
                let e2 = unit(like, k);
                det3(&[
                    [e1[0].clone(), e2[0].clone(), e3[0].clone()],
                    [e1[1].clone(), e2[1].clone(), e3[1].clone()],
                    [e1[2].clone(), e2[2].clone(), e3[2].clone()],
                ])
            })
            .collect();
        let k = pick(&dets).ok_or_else(|| Error::numeric("degenerate Nagell frame"))?;
        let e2 = unit(like, k);
        let basis = [
            [e1[0].clone(), e2[0].clone(), e3[0].clone()],
            [e1[1].clone(), e2[1].clone(), e3[1].clone()],
            [e1[2].clone(), e2[2].clone(), e3[2].clone()],
        ];
        let basis_inv = inv3(&basis)?;

        let subs: Vec<Form<F>> = (0..3).map(|i| Form::linear(&basis[i])).collect();
        let g3 = cubic.substitute(&subs);
        let mut parts = g3.collect(2);
        parts.resize(4, Form::zero(3));
        let (f3, f2, f1) = (parts[0].clone(), parts[1].clone(), parts[2].clone());
        let disc = f2.mul(&f2).sub(&f1.mul(&f3).scale(&like.from_i64_like(4)));
        let d: [F; 5] = std::array::from_fn(|k| disc.coeff(&[4 - k as u32, k as u32, 0]).cloned().unwrap_or_else(|| zero.clone()));
        let dscale = max_log2(&d);
        if negligible(&d[1], dscale, 0.5) {
            return Err(Error::SingularFiber("projected quartic has a multiple root at the marked point".into()));
        }
        let three = like.from_i64_like(3);
        let c1 = d[1].mul_ref(&d[3]);
        let c0 = d[1].square().mul_ref(&d[4]);
        let a = c1.sub_ref(&d[2].square().div_ref(&three));
        let b = c0
            .sub_ref(&c1.mul_ref(&d[2]).div_ref(&three))
            .add_ref(&d[2].pow_u(3).scale_i64(2).div_ref(&like.from_i64_like(27)));
        let curve = Curve::new(a, b).map_err(|_| Error::SingularFiber("reduced cubic is singular".into()))?;
        Ok(CubicReduction { curve, basis, basis_inv, flex, f1, f2, f3, d })
    }

    pub fn curve(&self) -> &Curve<F> {
        &self.curve
    }

    pub fn is_flex(&self) -> bool {
        self.flex
    }

    fn binary(&self, f: &Form<F>, u: &F) -> F {
        f.eval(&[u.clone(), u.one_like(), u.zero_like()])
    }

    fn column(&self, k: usize) -> Vec3<F> {
        std::array::from_fn(|i| self.basis[i][k].clone())
    }

    /// Plane point to the Weierstrass model; the marked point goes to infinity.
    pub fn forward(&self, q: &Vec3<F>) -> Result<Point<F>> {
        let [x, y, z] = mat_vec(&self.basis_inv, q);
        let scale = max_log2(&[x.clone(), z.clone()]);
        let third = self.d[2].div_ref(&x.from_i64_like(3));
        if negligible(&y, scale, 0.5) {
            if self.flex || x.log2_abs() >= z.log2_abs() {
                return Ok(Point::Infinity);
            }
            // centre of projection: over the root of f1(u, 1)
            let alpha = self.f1.coeff(&[1, 0, 0]).cloned().unwrap_or_else(|| x.zero_like());
            let beta = self.f1.coeff(&[0, 1, 0]).cloned().unwrap_or_else(|| x.zero_like());
            if alpha.is_zero() {
                return Err(Error::Indeterminate("projection centre has no finite image".into()));
            }
            let up = beta.neg_ref().div_ref(&alpha);
            let vp = self.binary(&self.f2, &up).neg_ref();
            return Ok(Point::Affine(self.d[1].mul_ref(&up).add_ref(&third), self.d[1].mul_ref(&vp)));
        }
        let u = x.div_ref(&y);
        let xy = [x.clone(), y.clone(), x.zero_like()];
        let v = self.f1.eval(&xy).mul_ref(&z).scale_i64(2).add_ref(&self.f2.eval(&xy)).div_ref(&y.square());
        Ok(Point::Affine(self.d[1].mul_ref(&u).add_ref(&third), self.d[1].mul_ref(&v)))
    }

    /// Weierstrass point back to plane coordinates.
    pub fn backward(&self, p: &Point<F>) -> Vec3<F> {
        let (x, y) = match p {
            Point::Infinity => return if self.flex { self.column(2) } else { self.column(0) },
            Point::Affine(x, y) => (x, y),
        };
        let third = self.d[2].div_ref(&x.from_i64_like(3));
        let u = x.sub_ref(&third).div_ref(&self.d[1]);
        let v = y.div_ref(&self.d[1]);
        let f1u = self.binary(&self.f1, &u);
        let f2u = self.binary(&self.f2, &u);
        let f3u = self.binary(&self.f3, &u);
        let scale = max_log2(&[u.clone(), u.one_like()]) + max_log2(&self.f1.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>());
        let z = if negligible(&f1u, scale, 0.5) {
            let fs = f2u.log2_abs().max(v.log2_abs());
            if negligible(&v.add_ref(&f2u), fs, 0.5) {
                return self.column(2);
            }
            f3u.neg_ref().div_ref(&f2u)
        } else {
            v.sub_ref(&f2u).div_ref(&f1u.scale_i64(2))
        };
        mat_vec(&self.basis, &[u.clone(), u.one_like(), z])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn cubic(terms: &[([u32; 3], i64)]) -> Form<Rational> {
        Form::from_terms(3, terms.iter().map(|(e, c)| (e.to_vec(), q(*c))))
    }

    #[test]
    fn weierstrass_input_is_flex() {
        // y^2 z = x^3 - x z^2 with O = (0:1:0)
        let c = cubic(&[([0, 2, 1], 1), ([3, 0, 0], -1), ([1, 0, 2], 1)]);
        let r = CubicReduction::new(&c, &[q(0), q(1), q(0)]).unwrap();
        assert!(r.is_flex());
        assert_eq!(r.curve().j_invariant().unwrap(), 1728);
        let pt = [q(0), q(0), q(1)];
        let w = r.forward(&pt).unwrap();
        assert!(r.curve().contains(&w));
        assert!(r.curve().mul(2, &w).unwrap().is_infinity());
        let back = r.backward(&w);
        assert!(cross(&back, &pt).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn non_flex_base_point() {
        // y^2 z = x^3 + z^3 with base (2:3:1), which is not a flex
        let c = cubic(&[([0, 2, 1], 1), ([3, 0, 0], -1), ([0, 0, 3], -1)]);
        let base = [q(2), q(3), q(1)];
        let r = CubicReduction::new(&c, &base).unwrap();
        assert!(!r.is_flex());
        assert_eq!(r.curve().j_invariant().unwrap(), 0);
        assert!(r.forward(&base).unwrap().is_infinity());
        // (0:1:0) and (-1:0:1) are points of the cubic
        for pt in [[q(0), q(1), q(0)], [q(-1), q(0), q(1)], [q(0), q(1), q(1)], [q(0), q(-1), q(1)]] {
            assert!(c.eval(&pt).is_zero());
            let w = r.forward(&pt).unwrap();
            assert!(r.curve().contains(&w), "{:?}", pt);
            let back = r.backward(&w);
            assert!(cross(&back, &pt).iter().all(|c| c.is_zero()), "{:?} {:?}", pt, back);
        }
    }
}
