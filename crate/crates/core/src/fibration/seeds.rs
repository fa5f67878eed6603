//! Seeds on fibers where the translation sections are torsion.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::locus::exact_order_oracle;
use crate::numerics::{poly_roots, BigComplex, Field, Poly, Ring};

use super::double::{DoubleFibration, Generator};
use super::form::Form;
use super::nagell::pick;
use super::surface::SurfacePoint;

/// Point lying on the `lambda` fiber over `s` and the `mu` fiber over `u`.
#[derive(Clone, Debug, Serialize)]
pub struct TorsionSeed {
    pub s: (String, String),
    pub u: (String, String),
    pub orders: (u32, u32),
    pub point: Vec<String>,
    #[serde(skip)]
    pub seed: Option<SurfacePoint<BigComplex>>,
}

impl DoubleFibration {
    /// Parameters of the `g` pencil where its section has exact order `n`.
    pub fn torsion_parameters(&self, g: Generator, n: u32, prec: u32) -> Result<Vec<BigComplex>> {
        let (fam, sec) = self.symbolic_family(g)?;
        let q = exact_order_oracle(&fam, &sec, n)?;
        if q.degree().unwrap_or(0) == 0 {
            return Ok(vec![]);
        }
        poly_roots(&q.to_complex(prec), prec)
    }

    /// Points off both axes on the intersection of the two fiber planes.
    pub fn common_points(&self, s: &BigComplex, u: &BigComplex) -> Result<Vec<SurfacePoint<BigComplex>>> {
        let prec = s.prec();
        let plane = |forms: &[[rug::Rational; 4]; 2], t: &BigComplex| -> [BigComplex; 4] {
            std::array::from_fn(|i| t.from_rational_like(&forms[0][i]).sub_ref(&t.mul_ref(&t.from_rational_like(&forms[1][i]))))
        };
        let h = [plane(&self.lambda_fib.forms, s), plane(&self.mu_fib.forms, u)];
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let minors: Vec<BigComplex> = pairs
            .iter()
            .map(|&(i, j)| h[0][i].mul_ref(&h[1][j]).sub_ref(&h[0][j].mul_ref(&h[1][i])))
            .collect();
        let k = pick(&minors).ok_or_else(|| Error::domain("fiber planes coincide"))?;
        let (i, j) = pairs[k];
        let det = &minors[k];
        let free: Vec<usize> = (0..4).filter(|&c| c != i && c != j).collect();
        // Basis of the line: one free coordinate set to 1, the pivots solved by Cramer.
        let basis: Vec<[BigComplex; 4]> = free
            .iter()
            .map(|&f| {
                let mut v: [BigComplex; 4] = std::array::from_fn(|_| BigComplex::zero(prec));
                v[f] = BigComplex::one(prec);
                let r0 = h[0][f].neg_ref();
                let r1 = h[1][f].neg_ref();
                v[i] = r0.mul_ref(&h[1][j]).sub_ref(&h[0][j].mul_ref(&r1)).div_ref(det);
                v[j] = h[0][i].mul_ref(&r1).sub_ref(&r0.mul_ref(&h[1][i])).div_ref(det);
                v
            })
            .collect();
        let subs: Vec<Form<BigComplex>> =
            (0..4).map(|c| Form::linear(&[basis[0][c].clone(), basis[1][c].clone()])).collect();
        let binary = self.surface.form().to_field(s).substitute(&subs);
        // Dehomogenize at the second basis vector; a drop in degree is a root at infinity.
        let mut coeffs = vec![BigComplex::zero(prec); 5];
        for (e, c) in binary.terms() {
            coeffs[e[0] as usize] = c.clone();
        }
        let poly = Poly::new(coeffs);
        let mut params: Vec<Option<BigComplex>> = match poly.degree() {
            Some(d) if d >= 1 => poly_roots(&poly, prec)?.into_iter().map(Some).collect(),
            _ => vec![],
        };
        if params.len() < 4 {
            params.push(None);
        }
        let mut out: Vec<SurfacePoint<BigComplex>> = vec![];
        for a in params {
            let c: [BigComplex; 4] = match &a {
                Some(a) => std::array::from_fn(|m| a.mul_ref(&basis[0][m]).add_ref(&basis[1][m])),
                None => basis[0].clone(),
            };
            let p = SurfacePoint::new_unchecked(c);
            if self.lambda_fib.parameter(p.coords()).is_err() || self.mu_fib.parameter(p.coords()).is_err() {
                continue;
            }
            if !self.surface.contains(p.coords()) {
                continue;
            }
            if out.iter().all(|q| q.distance(&p) > super::orbit::default_match_tol(prec)) {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Seeds on a `lambda` fiber of order `n1` and a `mu` fiber of order `n2`.
    pub fn doubly_torsion_seeds(&self, n1: u32, n2: u32, prec: u32) -> Result<Vec<TorsionSeed>> {
        let ss = self.torsion_parameters(Generator::Sigma, n1, prec)?;
        let us = self.torsion_parameters(Generator::Tau, n2, prec)?;
        let mut out = vec![];
        for s in &ss {
            for u in &us {
                for p in self.common_points(s, u)? {
                    out.push(TorsionSeed {
                        s: s.to_decimal_pair(),
                        u: u.to_decimal_pair(),
                        orders: (n1, n2),
                        point: p.to_strings(),
                        seed: Some(p),
                    });
                }
            }
        }
        Ok(out)
    }
}
