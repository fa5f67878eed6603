//! Polynomial root finding (Aberth–Ehrlich with Newton polishing) and a
//! damped Newton refiner for black-box analytic functions.

use rug::Float;

use crate::error::{Error, Result};

use super::complex::BigComplex;
use super::poly::Poly;

/// All roots of `p` with multiplicity, sorted by (Re, Im).
pub fn poly_roots(p: &Poly<BigComplex>, precision: u32) -> Result<Vec<BigComplex>> {
    let d = match p.degree() {
        None | Some(0) => return Err(Error::domain("poly_roots needs degree >= 1")),
        Some(d) => d,
    };
    let work = precision + 32;
    let coeffs: Vec<BigComplex> = p.coeffs().iter().map(|c| c.with_prec(work)).collect();
    let lead = coeffs[d].clone();
    let monic: Vec<BigComplex> = coeffs.iter().map(|c| c / &lead).collect();
    let mp = Poly::new(monic);

    // Exact zero roots are split off so the circle start stays well scaled.
    let zeros = mp.valuation();
    let reduced = Poly::new(mp.coeffs()[zeros..].to_vec());
    let mut roots: Vec<BigComplex> = (0..zeros).map(|_| BigComplex::zero(work)).collect();
    if let Some(rd) = reduced.degree() {
        if rd >= 1 {
            roots.extend(aberth(&reduced, rd, work)?);
        }
    }

    // Residual check against the original scaling.
    let abs_poly: Vec<Float> = p.coeffs().iter().map(|c| c.abs()).collect();
    for r in roots.iter() {
        let (val, _) = mp.eval_with_derivative(r);
        let rabs = r.abs();
        let mut scale = Float::with_val(work, 0);
        for c in abs_poly.iter().rev() {
            scale = scale * &rabs + c;
        }
        let scale = scale / lead.abs();
        let lhs = val.log2_abs_approx();
        let rhs = scale.to_f64().max(f64::MIN_POSITIVE).log2() - precision as f64 / 2.0;
        if lhs > rhs {
            return Err(Error::numeric(format!(
                "ill-conditioned root cluster near {:?} (residual 2^{:.1})",
                r, lhs
            )));
        }
    }
    let mut out: Vec<BigComplex> = roots.into_iter().map(|r| r.with_prec(precision)).collect();
    out.sort_by(|a, b| a.cmp_lex(b));
    Ok(out)
}

fn aberth(p: &Poly<BigComplex>, d: usize, work: u32) -> Result<Vec<BigComplex>> {
    // Upper bound on root moduli (Fujiwara) sets the starting circle.
    let c = p.coeffs();
    let mut bound = 0f64;
    for k in 1..=d {
        let a = c[d - k].abs_f64();
        if a > 0.0 {
            let mut v = a.powf(1.0 / k as f64);
            if k == d {
                v *= 0.5f64.powf(1.0 / k as f64);
            }
            bound = bound.max(2.0 * v);
        }
    }
    let radius = if bound > 0.0 { bound * 0.5 } else { 1.0 };
    let mut z: Vec<BigComplex> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            BigComplex::from_f64(radius * ang.cos(), radius * ang.sin(), work)
        })
        .collect();

    let target = work as f64 - 4.0;
    let abs_coeffs: Vec<Float> = c.iter().map(|x| Float::with_val(64, x.abs())).collect();
    let max_iter = 200 + 8 * work as usize;
    let mut done = vec![false; d];
    for _ in 0..max_iter {
        let mut all_done = true;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let (val, der) = p.eval_with_derivative(&z[k]);
            // Residual at the rounding level: further steps are noise.
            let zabs = Float::with_val(64, z[k].abs());
            let mut scale = Float::with_val(64, 0);
            for a in abs_coeffs.iter().rev() {
                scale = scale * &zabs + a;
            }
            let floor = scale.to_f64_exp();
            let floor_log2 = (floor.0.abs().max(f64::MIN_POSITIVE)).log2() + floor.1 as f64;
            if val.is_zero_exact() || val.log2_abs_approx() < floor_log2 - target + 4.0 {
                done[k] = true;
                continue;
            }
            let w = &val / &der;
            let mut s = BigComplex::zero(work);
            for j in 0..d {
                if j != k {
                    let diff = &z[k] - &z[j];
                    if !diff.is_zero_exact() {
                        s = &s + &diff.recip_fast();
                    }
                }
            }
            let denom = &BigComplex::one(work) - &(&w * &s);
            let step = if denom.is_zero_exact() { w } else { &w / &denom };
            if !step.is_finite() {
                return Err(Error::numeric("aberth iteration diverged"));
            }
            z[k] = &z[k] - &step;
            let zl = z[k].log2_abs_approx().max(0.0);
            if zl - step.log2_abs_approx() >= target {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    // Newton polish; keeps the iterate only when the residual drops.
    for zk in z.iter_mut() {
        for _ in 0..4 {
            let (val, der) = p.eval_with_derivative(zk);
            if val.is_zero_exact() || der.is_zero_exact() {
                break;
            }
            let cand = &*zk - &(&val / &der);
            let (v2, _) = p.eval_with_derivative(&cand);
            if v2.abs() < val.abs() {
                *zk = cand;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Damped Newton iteration on an analytic function given with its derivative.
/// The step is halved while `|f|` increases. Converges when `|f(t)| < tol`.
pub fn newton_refine<F>(mut f: F, t0: &BigComplex, tol: &Float) -> Result<BigComplex>
where
    F: FnMut(&BigComplex) -> Result<(BigComplex, BigComplex)>,
{
    let mut t = t0.clone();
    let (mut val, mut der) = f(&t)?;
    let mut best = (t.clone(), val.abs());
    const MAX_ITER: usize = 64;
    for _ in 0..MAX_ITER {
        let fabs = val.abs();
        if fabs < *tol {
            return Ok(t);
        }
        if der.is_zero_exact() {
            break;
        }
        let mut step = &val / &der;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = &t - &step;
            if let Ok((v2, d2)) = f(&cand) {
                if v2.abs() < fabs {
                    t = cand;
                    val = v2;
                    der = d2;
                    accepted = true;
                    break;
                }
            }
            step = step.div_int(2);
        }
        if !accepted {
            break;
        }
        let a = val.abs();
        if a < best.1 {
            best = (t.clone(), a);
        }
    }
    if val.abs() < *tol {
        return Ok(t);
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        best: best.0.to_string(),
        residual: best.1.to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cpoly(cs: &[i64], prec: u32) -> Poly<BigComplex> {
        Poly::new(cs.iter().map(|&c| BigComplex::from_i64(c, prec)).collect())
    }

    #[test]
    fn simple_quadratics() {
        let r = poly_roots(&cpoly(&[-1, 0, 1], 256), 256).unwrap();
        assert!((r[0].re_f64() + 1.0).abs() < 1e-60);
        assert!((r[1].re_f64() - 1.0).abs() < 1e-60);
        let r = poly_roots(&cpoly(&[0, -1, 1], 256), 256).unwrap();
        assert!(r[0].abs_f64() < 1e-60);
        assert!((r[1].re_f64() - 1.0).abs() < 1e-60);
    }

    #[test]
    fn cube_root_of_two_against_newton() {
        let roots = poly_roots(&cpoly(&[-2, 0, 0, 1], 256), 256).unwrap();
        // Independent route: plain Newton from 1.0.
        let tol = Float::with_val(256, Float::i_exp(1, -200));
        let r = newton_refine(
            |t| {
                let t2 = t * t;
                Ok((&(&t2 * t) - &BigComplex::from_i64(2, 256), t2.mul_int(3)))
            },
            &BigComplex::one(256),
            &tol,
        )
        .unwrap();
        let real: Vec<_> = roots.iter().filter(|z| z.im_f64().abs() < 1e-40).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0] - &r).log2_abs_approx() < -190.0);
        assert!((r.re_f64() - 1.2599210499).abs() < 1e-9);
        let cx: Vec<_> = roots.iter().filter(|z| z.im_f64().abs() > 0.1).collect();
        assert_eq!(cx.len(), 2);
        assert!((cx[0].conj() - cx[1]).log2_abs_approx() < -190.0);
    }

    #[test]
    fn product_reproduces_coefficients() {
        let p = Poly::from_i64s(&[7, -3, 0, 5, 2, -1]).to_complex(256);
        let roots = poly_roots(&p, 256).unwrap();
        let lead = p.leading().unwrap().clone();
        let mut prod = Poly::constant(lead);
        for r in &roots {
            prod = prod.mul(&Poly::new(vec![-r, BigComplex::one(256)]));
        }
        for (a, b) in prod.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).log2_abs_approx() < -120.0);
        }
    }

    #[test]
    fn newton_textbook_cases() {
        let tol = Float::with_val(256, Float::i_exp(1, -200));
        let r = newton_refine(
            |t| Ok((&(t * t) - &BigComplex::from_i64(2, 256), t.mul_int(2))),
            &BigComplex::one(256),
            &tol,
        )
        .unwrap();
        let sqrt2 = Float::with_val(256, 2).sqrt();
        assert!((r.re().clone() - sqrt2).abs() < 1e-70);
        let r = newton_refine(
            |t| Ok((t.clone(), BigComplex::one(256))),
            &BigComplex::from_f64(0.3, 0.0, 256),
            &tol,
        )
        .unwrap();
        assert!(r.abs_f64() < 1e-60);
    }

    #[test]
    fn newton_reports_divergence() {
        let tol = Float::with_val(128, Float::i_exp(1, -100));
        let err = newton_refine(
            |t| Ok((&(t * t) + &BigComplex::one(128), t.mul_int(2))),
            &BigComplex::from_f64(1.0, 0.0, 128),
            &tol,
        );
        // Real start on x^2+1: the iteration stays real and cannot converge.
        assert!(matches!(err, Err(Error::NoConvergence { .. })));
    }
}
