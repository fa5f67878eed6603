use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, Poly};

use super::modpoly::{modular_poly, verify_checksum, with_checksum};

/// Plane curve `F(t, u) = 0`; `coeffs[a][b]` multiplies `t^a u^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsogenyLocus {
    pub level: u32,
    coeffs: Vec<Vec<Integer>>,
}

fn ipoly(cs: &[i64]) -> Poly<Integer> {
    Poly::new(cs.iter().map(|&c| Integer::from(c)).collect())
}

/// Legendre `j = 256 (t^2 - t + 1)^3 / (t^2 (t - 1)^2)` as (numerator, denominator).
pub fn legendre_j_parts() -> (Poly<Integer>, Poly<Integer>) {
    let q = ipoly(&[1, -1, 1]);
    let num = q.mul(&q).mul(&q).scale(&Integer::from(256));
    let d = ipoly(&[0, -1, 1]);
    (num, d.mul(&d))
}

pub fn legendre_j(t: &BigComplex) -> BigComplex {
    let (n, d) = legendre_j_parts();
    &n.eval_complex(t) / &d.eval_complex(t)
}

impl IsogenyLocus {
    pub fn new(level: u32, coeffs: Vec<Vec<Integer>>) -> Self {
        let mut l = IsogenyLocus { level, coeffs };
        l.trim();
        l
    }

    fn trim(&mut self) {
        for row in &mut self.coeffs {
            while row.len() > 1 && *row.last().unwrap() == 0 {
                row.pop();
            }
        }
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().iter().all(|c| *c == 0) {
            self.coeffs.pop();
        }
    }

    pub fn coeff(&self, a: usize, b: usize) -> Integer {
        self.coeffs.get(a).and_then(|r| r.get(b)).cloned().unwrap_or_default()
    }

    pub fn degree_t(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree_u(&self) -> usize {
        self.coeffs.iter().map(|r| r.len()).max().unwrap_or(1) - 1
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.degree_t().max(self.degree_u());
        (0..=d).all(|a| (0..a).all(|b| self.coeff(a, b) == self.coeff(b, a)))
    }

    pub fn eval(&self, t: &BigComplex, u: &BigComplex) -> BigComplex {
        let prec = t.prec().min(u.prec());
        let mut acc = BigComplex::zero(prec);
        for row in self.coeffs.iter().rev() {
            let r = Poly::new(row.clone()).eval_complex(u);
            acc = &(&acc * t) + &r;
        }
        acc
    }

    /// `log2 sum |c_ab| |t|^a |u|^b`.
    pub fn scale_log2(&self, t: &BigComplex, u: &BigComplex) -> f64 {
        let (lt, lu) = (t.abs_f64().max(1e-300).log2(), u.abs_f64().max(1e-300).log2());
        let mut terms = vec![];
        for (a, row) in self.coeffs.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if *c != 0 {
                    let (m, e) = c.to_f64_exp();
                    terms.push(e as f64 + m.abs().log2() + a as f64 * lt + b as f64 * lu);
                }
            }
        }
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        top + terms.iter().map(|x| (x - top).exp2()).sum::<f64>().log2()
    }

    /// `F(t, u0)` as a polynomial in `t`.
    pub fn specialize_u(&self, u: &Rational) -> Poly<Rational> {
        Poly::new(
            self.coeffs
                .iter()
                .map(|row| Poly::new(row.clone()).to_rational().eval(u))
                .collect(),
        )
    }

    fn column_poly(&self, a: usize) -> Poly<Integer> {
        Poly::new(self.coeffs.get(a).cloned().unwrap_or_default())
    }

    /// Exact quotient by `t - c`, if it divides.
    fn div_t_minus(&self, c: i64) -> Option<Self> {
        // Synthetic division in t with coefficients in Z[u].
        let n = self.degree_t();
        if n == 0 {
            return None;
        }
        let c = Integer::from(c);
        let mut q: Vec<Poly<Integer>> = vec![Poly::zero(); n];
        let mut carry: Poly<Integer> = Poly::zero();
        for a in (1..=n).rev() {
            carry = self.column_poly(a).add(&carry.scale(&c));
            q[a - 1] = carry.clone();
        }
        let rem = self.column_poly(0).add(&carry.scale(&c));
        if !rem.is_zero_poly() {
            return None;
        }
        Some(IsogenyLocus::new(self.level, q.into_iter().map(|p| p.into_coeffs()).collect()))
    }

    fn transpose(&self) -> Self {
        let (dt, du) = (self.degree_t(), self.degree_u());
        let coeffs = (0..=du).map(|b| (0..=dt).map(|a| self.coeff(a, b)).collect()).collect();
        IsogenyLocus::new(self.level, coeffs)
    }

    /// Exact quotient by `t - u`, if it divides.
    fn div_diagonal(&self) -> Option<Self> {
        let n = self.degree_t();
        if n == 0 {
            return None;
        }
        let u = ipoly(&[0, 1]);
        let mut q: Vec<Poly<Integer>> = vec![Poly::zero(); n];
        let mut carry: Poly<Integer> = Poly::zero();
        for a in (1..=n).rev() {
            carry = self.column_poly(a).add(&carry.mul(&u));
            q[a - 1] = carry.clone();
        }
        let rem = self.column_poly(0).add(&carry.mul(&u));
        if !rem.is_zero_poly() {
            return None;
        }
        Some(IsogenyLocus::new(self.level, q.into_iter().map(|p| p.into_coeffs()).collect()))
    }

    /// Divides by the integer content, sign fixed by the leading coefficient.
    fn primitive(&self) -> Self {
        let mut g = Integer::new();
        for row in &self.coeffs {
            for c in row {
                g.gcd_mut(c);
            }
        }
        if g == 0 {
            return self.clone();
        }
        let lead = self.coeffs.last().and_then(|r| r.iter().rev().find(|c| **c != 0)).cloned().unwrap_or_default();
        if lead < 0 {
            g = -g;
        }
        let coeffs = self.coeffs.iter().map(|r| r.iter().map(|c| Integer::from(c / &g)).collect()).collect();
        IsogenyLocus::new(self.level, coeffs)
    }

    /// Text export: `LOCUS N <N>`, rows `a b c`, checksum line.
    pub fn to_text(&self) -> String {
        let mut body = format!("LOCUS N {}\n", self.level);
        for (a, row) in self.coeffs.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if *c != 0 {
                    body.push_str(&format!("{} {} {}\n", a, b, c));
                }
            }
        }
        with_checksum(&body)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let body = verify_checksum(text)?;
        let mut lines = body.lines();
        let header = lines.next().unwrap_or("");
        let level: u32 = header
            .strip_prefix("LOCUS N ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::DataIntegrity(format!("bad header {:?}", header)))?;
        let mut coeffs: Vec<Vec<Integer>> = vec![];
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::DataIntegrity(format!("bad row {:?}", line));
            if f.len() != 3 {
                return Err(bad());
            }
            let a: usize = f[0].parse().map_err(|_| bad())?;
            let b: usize = f[1].parse().map_err(|_| bad())?;
            let c: Integer = f[2].parse().map_err(|_| bad())?;
            if coeffs.len() <= a {
                coeffs.resize(a + 1, vec![]);
            }
            if coeffs[a].len() <= b {
                coeffs[a].resize(b + 1, Integer::new());
            }
            coeffs[a][b] = c;
        }
        Ok(IsogenyLocus::new(level, coeffs))
    }
}

/// Numerator of `Phi_N(j(t), j(u))` for the Legendre `j`, with the factors
/// `t`, `t - 1`, `u`, `u - 1` (and `t - u` for `N > 1`) divided out.
pub fn legendre_isogeny_locus(n: u32) -> Result<IsogenyLocus> {
    let phi = modular_poly(n)?;
    let d = phi.degree();
    let (num, den) = legendre_j_parts();
    // P_i = num^i den^(d - i)
    let p: Vec<Poly<Integer>> = (0..=d).map(|i| num.pow(i as u32).mul(&den.pow((d - i) as u32))).collect();
    // F = sum_j Q_j(t) P_j(u) with Q_j = sum_i c_ij P_i
    let width = p.iter().map(|q| q.coeffs().len()).max().unwrap_or(1);
    let mut coeffs = vec![vec![Integer::new(); width]; width];
    for j in 0..=d {
        let mut qj: Poly<Integer> = Poly::zero();
        for i in 0..=d {
            if *phi.coeff(i, j) != 0 {
                qj = qj.add(&p[i].scale(phi.coeff(i, j)));
            }
        }
        for (a, ca) in qj.coeffs().iter().enumerate() {
            if *ca == 0 {
                continue;
            }
            for (b, cb) in p[j].coeffs().iter().enumerate() {
                coeffs[a][b] += Integer::from(ca * cb);
            }
        }
    }
    let mut f = IsogenyLocus::new(n, coeffs);
    for c in [0, 1] {
        while let Some(g) = f.div_t_minus(c) {
            f = g;
        }
        let mut tr = f.transpose();
        while let Some(g) = tr.div_t_minus(c) {
            tr = g;
        }
        f = tr.transpose();
    }
    if n > 1 {
        while let Some(g) = f.div_diagonal() {
            f = g;
        }
    }
    Ok(f.primitive())
}

/// Points `(t, u)` on the level-`n` locus over a fixed `u`, from the roots
/// of the specialization.
pub fn locus_points(locus: &IsogenyLocus, u: &Rational, prec: u32) -> Result<Vec<(BigComplex, BigComplex)>> {
    let f = locus.specialize_u(u);
    if f.degree().unwrap_or(0) == 0 {
        return Err(Error::domain("degenerate specialization of the locus"));
    }
    let roots = crate::numerics::poly_roots(&f.to_complex(prec), prec)?;
    let uc = BigComplex::from_rational(u, prec);
    Ok(roots.into_iter().map(|t| (t, uc.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isogeny::is_isogenous;

    #[test]
    fn level_two_locus() {
        let l = legendre_isogeny_locus(2).unwrap();
        assert!(l.is_symmetric());
        assert_eq!(l.degree_t(), 18);
        assert_eq!(IsogenyLocus::parse(&l.to_text()).unwrap(), l);
        let pts = locus_points(&l, &Rational::from((7, 3)), 128).unwrap();
        assert_eq!(pts.len(), 18);
        for (t, u) in &pts {
            let got = is_isogenous(&legendre_j(t), &legendre_j(u), 2).unwrap();
            assert_eq!(got, Some(2));
        }
    }
}
