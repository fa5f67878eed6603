use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{negligible, BigComplex, Field, RatFunc, Ring};

use super::form::Form;

/// Coordinate fields for projective points.
pub trait Coord: Field {
    /// Canonical representative: coprime integers with first nonzero entry
    /// positive (exact), or largest-modulus entry equal to 1 (numeric).
    fn normalize(v: &mut [Self]);
}

impl Coord for Rational {
    fn normalize(v: &mut [Self]) {
        let mut l = Integer::from(1);
        for c in v.iter() {
            l.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = v.iter().map(|c| Rational::from(c * &l).into_numer_denom().0).collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        if g == 0 {
            return;
        }
        let first_neg = ints.iter().find(|c| **c != 0).map_or(false, |c| *c < 0);
        if first_neg {
            g = -g;
        }
        for (c, i) in v.iter_mut().zip(ints) {
            *c = Rational::from(i / &g);
        }
    }
}

impl Coord for BigComplex {
    fn normalize(v: &mut [Self]) {
        let mut k = 0;
        let mut best = v[0].abs();
        for (i, c) in v.iter().enumerate().skip(1) {
            let a = c.abs();
            if a > best {
                best = a;
                k = i;
            }
        }
        if best.is_zero() {
            return;
        }
        let p = v[k].clone();
        for c in v.iter_mut() {
            *c = &*c / &p;
        }
    }
}

impl Coord for RatFunc {
    fn normalize(v: &mut [Self]) {
        if let Some(p) = v.iter().find(|c| !c.is_zero()).cloned() {
            for c in v.iter_mut() {
                *c = c.div_ref(&p);
            }
        }
    }
}

/// Quartic form in `(x, y, z, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticSurface {
    form: Form<Rational>,
}

impl QuarticSurface {
    pub fn new(form: Form<Rational>) -> Result<Self> {
        if form.nvars() != 4 || form.is_zero() || form.terms().any(|(e, _)| e.iter().sum::<u32>() != 4) {
            return Err(Error::domain("surface must be a nonzero quartic form in 4 variables"));
        }
        Ok(QuarticSurface { form })
    }

    /// `x^4 + y^4 - z^4 - w^4`.
    pub fn fermat() -> Self {
        let t = |i: usize, c: i64| {
            let mut e = vec![0; 4];
            e[i] = 4;
            (e, Rational::from(c))
        };
        QuarticSurface::new(Form::from_terms(4, [t(0, 1), t(1, 1), t(2, -1), t(3, -1)])).unwrap()
    }

    pub fn form(&self) -> &Form<Rational> {
        &self.form
    }

    pub fn eval<F: Field>(&self, p: &[F]) -> F {
        self.form.to_field(&p[0]).eval(p)
    }

    /// Exact vanishing, or residual below `2^(-prec/2)` relative to the
    /// largest coordinate.
    pub fn contains<F: Field>(&self, p: &[F]) -> bool {
        let scale = p.iter().map(|c| c.log2_abs()).fold(f64::NEG_INFINITY, f64::max);
        negligible(&self.eval(p), 4.0 * scale + 2.0, 0.5)
    }
}

/// Line in P^3 spanned by two rational points.
#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub name: String,
    pub points: [[Rational; 4]; 2],
}

impl Line {
    pub fn new(name: impl Into<String>, p: [i64; 4], q: [i64; 4]) -> Self {
        let c = |v: [i64; 4]| v.map(Rational::from);
        Line { name: name.into(), points: [c(p), c(q)] }
    }

    pub fn point_at<F: Field>(&self, a: &F, b: &F) -> [F; 4] {
        let [p, q] = &self.points;
        std::array::from_fn(|i| a.mul_ref(&a.from_rational_like(&p[i])).add_ref(&b.mul_ref(&b.from_rational_like(&q[i]))))
    }

    /// The line lies on the surface: the restriction vanishes identically.
    pub fn lies_on(&self, s: &QuarticSurface) -> bool {
        let subs: Vec<Form<Rational>> =
            (0..4).map(|i| Form::linear(&[self.points[0][i].clone(), self.points[1][i].clone()])).collect();
        s.form.substitute(&subs).is_zero()
    }
}

/// Projective point on the surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint<F> {
    coords: [F; 4],
}

impl<F: Coord> SurfacePoint<F> {
    pub fn new(surface: &QuarticSurface, mut coords: [F; 4]) -> Result<Self> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(Error::domain("zero vector is not a projective point"));
        }
        F::normalize(&mut coords);
        if !surface.contains(&coords) {
            return Err(Error::domain("point is not on the surface"));
        }
        Ok(SurfacePoint { coords })
    }

    /// Normalizes without the membership check.
    pub fn new_unchecked(mut coords: [F; 4]) -> Self {
        F::normalize(&mut coords);
        SurfacePoint { coords }
    }

    pub fn coords(&self) -> &[F; 4] {
        &self.coords
    }
}

impl SurfacePoint<Rational> {
    pub fn from_i64(surface: &QuarticSurface, c: [i64; 4]) -> Result<Self> {
        SurfacePoint::new(surface, c.map(Rational::from))
    }

    pub fn to_complex(&self, prec: u32) -> SurfacePoint<BigComplex> {
        SurfacePoint::new_unchecked(self.coords.clone().map(|c| BigComplex::from_rational(&c, prec)))
    }
}

impl SurfacePoint<BigComplex> {
    /// Max-norm distance after scaling both points to 1 at the largest
    /// coordinate of `self`.
    pub fn distance(&self, other: &Self) -> f64 {
        let k = (0..4).max_by(|&i, &j| self.coords[i].abs().partial_cmp(&self.coords[j].abs()).unwrap()).unwrap();
        if other.coords[k].is_zero_exact() {
            return f64::INFINITY;
        }
        (0..4)
            .map(|i| {
                let a = &self.coords[i] / &self.coords[k];
                let b = &other.coords[i] / &other.coords[k];
                a.dist(&b).to_f64()
            })
            .fold(0.0, f64::max)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        SurfacePoint { coords: self.coords.clone().map(|c| c.with_prec(prec)) }
    }

    pub fn prec(&self) -> u32 {
        self.coords[0].prec()
    }

    /// Decimal strings `re im` of the normalized coordinates.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermat_membership() {
        let s = QuarticSurface::fermat();
        assert!(SurfacePoint::from_i64(&s, [1, 1, 1, 1]).is_ok());
        let e = SurfacePoint::from_i64(&s, [59, 158, 133, 134]).unwrap();
        assert_eq!(e.coords()[0], 59);
        assert!(SurfacePoint::from_i64(&s, [1, 2, 3, 4]).is_err());
        let n = SurfacePoint::from_i64(&s, [-2, -2, 2, 2]).unwrap();
        assert_eq!(n.coords().clone().map(|c| c.to_f64()), [1.0, 1.0, -1.0, -1.0]);
        assert!(Line::new("x=z,y=w", [1, 0, 1, 0], [0, 1, 0, 1]).lies_on(&s));
        assert!(!Line::new("bad", [1, 0, 0, 0], [0, 1, 0, 0]).lies_on(&s));
    }
}
