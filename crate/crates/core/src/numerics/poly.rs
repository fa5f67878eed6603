//! Dense univariate polynomials, lowest degree first.

use rug::{Integer, Rational};

use super::complex::BigComplex;
use super::field::{Field, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    /// Builds a polynomial, trimming exact zeros at the top.
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: R, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![c.zero_like(); k];
        v.push(c);
        Poly { coeffs: v }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&R> {
        self.coeffs.get(i)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => out.push(a.add_ref(b)),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => out.push(a.sub_ref(b)),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.neg_ref()),
                (None, None) => unreachable!(),
            }
        }
        Poly::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::zero();
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![self.coeffs[0].zero_like(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut v = vec![self.coeffs[0].zero_like(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale_i64(i as i64))
                .collect(),
        )
    }

    /// `self(other(x))`
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Order of vanishing at 0.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn pow(&self, e: u32) -> Self
    where
        R: Default,
    {
        let mut acc = Poly::constant(self.one_like_or_default());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn one_like_or_default(&self) -> R
    where
        R: Default,
    {
        match self.coeffs.first() {
            Some(c) => c.one_like(),
            None => R::default().one_like(),
        }
    }
}

impl<R: Field> Poly<R> {
    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = divisor.coeffs[dd].inv_ref();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![rem[0].zero_like(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].mul_ref(&lead_inv);
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].sub_ref(&c.mul_ref(d));
                }
            }
            rem[k + dd] = c.zero_like();
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.inv_ref();
                self.scale(&inv)
            }
        }
    }

    /// Monic gcd (exact fields only give exact answers).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero_poly() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Poly<Rational> {
    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// Evaluate at a complex point.
    pub fn eval_complex(&self, z: &BigComplex) -> BigComplex {
        let p = z.prec();
        let mut acc = BigComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &BigComplex::from_rational(c, p);
        }
        acc
    }

    pub fn to_complex(&self, prec: u32) -> Poly<BigComplex> {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigComplex::from_rational(c, prec))
                .collect(),
        }
    }

    /// Scale to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive_integer(&self) -> Poly<Integer> {
        if self.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut l = Integer::from(1);
        for c in &self.coeffs {
            l.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
            .collect();
        primitive_part(&Poly::new(ints))
    }

    /// Exact squarefree part (product of distinct irreducible factors), monic.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }
}

impl Poly<Integer> {
    pub fn to_rational(&self) -> Poly<Rational> {
        Poly::new(self.coeffs.iter().map(|c| Rational::from(c.clone())).collect())
    }

    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(c);
        }
        g
    }

    pub fn eval_complex(&self, z: &BigComplex) -> BigComplex {
        let p = z.prec();
        let mut acc = BigComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &BigComplex::from_rational(&Rational::from(c.clone()), p);
        }
        acc
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(0)
    }
}

/// Content removed, leading coefficient made positive.
pub fn primitive_part(p: &Poly<Integer>) -> Poly<Integer> {
    if p.is_zero_poly() {
        return Poly::zero();
    }
    let mut g = p.content();
    if p.leading().unwrap().cmp0() == std::cmp::Ordering::Less {
        g = -g;
    }
    Poly::new(p.coeffs.iter().map(|c| Integer::from(c / &g)).collect())
}

impl Poly<BigComplex> {
    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).min().unwrap_or(super::complex::DEFAULT_PRECISION)
    }

    /// Horner evaluation returning `(p(z), p'(z))`.
    pub fn eval_with_derivative(&self, z: &BigComplex) -> (BigComplex, BigComplex) {
        let mut p = BigComplex::zero(z.prec());
        let mut dp = BigComplex::zero(z.prec());
        for c in self.coeffs.iter().rev() {
            dp = &(&dp * z) + &p;
            p = &(&p * z) + c;
        }
        (p, dp)
    }
}

impl<R: Ring + Default> Default for Poly<R> {
    fn default() -> Self {
        Poly::zero()
    }
}

impl<R: Ring + Default> Ring for Poly<R> {
    fn zero_like(&self) -> Self {
        Poly::zero()
    }
    fn one_like(&self) -> Self {
        Poly::constant(self.one_like_or_default())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        let t = match self.coeffs.first() {
            Some(c) => c.clone(),
            None => R::default(),
        };
        Poly::constant(t.from_i64_like(n))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(cs: &[i64]) -> Poly<Rational> {
        Poly::from_i64s(cs)
    }

    #[test]
    fn trims_and_degrees() {
        assert_eq!(q(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(q(&[0, 0]).degree(), None);
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)(x+2) and (x-1)(x-3)
        let a = q(&[-2, 1, 1]);
        let b = q(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), q(&[-1, 1]));
        let (qq, r) = a.mul(&b).div_rem(&b);
        assert_eq!(qq, a);
        assert!(r.is_zero_poly());
    }

    #[test]
    fn compose_and_derivative() {
        let p = q(&[0, 0, 1]); // x^2
        let s = q(&[1, 1]); // x + 1
        assert_eq!(p.compose(&s), q(&[1, 2, 1]));
        assert_eq!(q(&[5, 3, 2]).derivative(), q(&[3, 4]));
    }

    #[test]
    fn squarefree_part_drops_repeats() {
        let p = q(&[0, 0, 1]).mul(&q(&[-1, 1])); // x^2 (x-1)
        assert_eq!(p.squarefree_part(), q(&[0, -1, 1]));
    }

    #[test]
    fn primitive_integer_scaling() {
        let p = Poly::new(vec![Rational::from((1, 2)), Rational::from((-3, 4))]);
        let z = p.primitive_integer();
        assert_eq!(z.coeffs(), &[Integer::from(-2), Integer::from(3)]);
    }
}
