//! Homogeneous polynomials in a fixed number of variables.

use std::collections::BTreeMap;

use rug::Rational;

use crate::numerics::Field;

/// Sparse form; monomials are exponent vectors of length `nvars`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<F> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, F>,
}

impl<F: Field> Form<F> {
    pub fn zero(nvars: usize) -> Self {
        Form { nvars, terms: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, F)>) -> Self {
        let mut f = Form::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            f.add_term(e, c);
        }
        f
    }

    /// `sum c_i v_i`.
    pub fn linear(coeffs: &[F]) -> Self {
        let n = coeffs.len();
        Form::from_terms(
            n,
            coeffs.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, c.clone())
            }),
        )
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        Form::from_terms(nvars, [(vec![0; nvars], c)])
    }

    fn add_term(&mut self, e: Vec<u32>, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.add_ref(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &F)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn coeff(&self, e: &[u32]) -> Option<&F> {
        self.terms.get(e)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.neg_ref());
        }
        r
    }

    pub fn scale(&self, k: &F) -> Self {
        Form::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c.mul_ref(k))))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Form::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1.mul_ref(c2));
            }
        }
        r
    }

    pub fn eval(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.nvars);
        let mut acc: Option<F> = None;
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t.mul_ref(&xi.pow_u(k));
                }
            }
            acc = Some(match acc {
                None => t,
                Some(a) => a.add_ref(&t),
            });
        }
        acc.unwrap_or_else(|| x[0].zero_like())
    }

    /// Replace variable `i` by the form `subs[i]` (all in the same new ring of variables).
    pub fn substitute(&self, subs: &[Form<F>]) -> Form<F> {
        assert_eq!(subs.len(), self.nvars);
        let m = subs[0].nvars;
        let mut cache: Vec<Vec<Form<F>>> = vec![vec![]; self.nvars];
        let mut r = Form::zero(m);
        for (e, c) in &self.terms {
            let mut t = Form::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                if powers.is_empty() {
                    powers.push(Form::constant(m, c.one_like()));
                }
                while powers.len() <= k as usize {
                    let next = powers.last().unwrap().mul(&subs[i]);
                    powers.push(next);
                }
                t = t.mul(&powers[k as usize]);
            }
            r = r.add(&t);
        }
        r
    }

    pub fn derivative(&self, i: usize) -> Self {
        Form::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c.scale_i64(e[i] as i64))
            }),
        )
    }

    pub fn gradient(&self, x: &[F]) -> Vec<F> {
        (0..self.nvars).map(|i| self.derivative(i).eval(x)).collect()
    }

    /// Exact quotient by variable `i`; terms without it are returned as remainder.
    pub fn div_var(&self, i: usize) -> (Self, Self) {
        let mut q = Form::zero(self.nvars);
        let mut r = Form::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                q.add_term(e2, c.clone());
            } else {
                r.add_term(e.clone(), c.clone());
            }
        }
        (q, r)
    }

    /// Collect by powers of variable `i`: entry `k` is the coefficient of `v_i^k`
    /// as a form in the remaining variables (variable `i` kept with exponent 0).
    pub fn collect(&self, i: usize) -> Vec<Form<F>> {
        let mut out: Vec<Form<F>> = vec![];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            while out.len() <= k {
                out.push(Form::zero(self.nvars));
            }
            let mut e2 = e.clone();
            e2[i] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Form<G> {
        Form::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }
}

impl Form<Rational> {
    pub fn to_field<G: Field>(&self, like: &G) -> Form<G> {
        self.map(|c| like.from_rational_like(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn substitution_and_division() {
        // x^2 - y^2 with x = a + b, y = a - b gives 4ab
        let f = Form::from_terms(2, [(vec![2, 0], q(1)), (vec![0, 2], q(-1))]);
        let x = Form::linear(&[q(1), q(1)]);
        let y = Form::linear(&[q(1), q(-1)]);
        let g = f.substitute(&[x, y]);
        assert_eq!(g, Form::from_terms(2, [(vec![1, 1], q(4))]));
        let (quo, rem) = g.div_var(0);
        assert!(rem.is_zero());
        assert_eq!(quo.eval(&[q(7), q(3)]), q(12));
        assert_eq!(g.derivative(1).eval(&[q(2), q(5)]), q(8));
    }
}
