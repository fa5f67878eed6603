//! Points where `x`, `sigma(x)` and `tau(sigma(x))` all carry torsion sections.

use serde::Serialize;

use crate::elliptic::Point;
use crate::error::Result;
use crate::fibration::{DoubleFibration, Generator, SurfacePoint};
use crate::numerics::BigComplex;
use crate::periods::{betti_coords, elliptic_log, period_lattice};

use super::scan::ScanWindow;

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalHit {
    /// `lambda(x)`.
    pub s: (String, String),
    pub point: Vec<String>,
    /// Orders on the `lambda` fiber of `x`, the `mu` fiber of `sigma(x)` and
    /// the `lambda` fiber of `tau(sigma(x))`.
    pub orders: (u32, u32, u32),
}

/// Smallest `n <= bound` with the section of the `g` fiber through `p` of
/// order `n`, read off its Betti coordinates.
pub fn section_order(x: &DoubleFibration, g: Generator, p: &SurfacePoint<BigComplex>, bound: u32) -> Result<Option<u32>> {
    let prec = p.prec();
    let fib = x.fiber_of(g, p)?;
    let e = fib.curve();
    let basis = period_lattice(e, prec)?;
    let (b1, b2) = betti_coords(&elliptic_log(e, &fib.section, &basis)?)?.to_f64();
    let tol = (-(prec as f64) / 4.0).exp2().max(1e-12);
    for n in 1..=bound {
        let off = |b: f64| {
            let v = b * n as f64;
            (v - v.round()).abs()
        };
        if off(b1) < tol && off(b2) < tol {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `true` when `n` times the section of the `g` fiber through `p` is at infinity.
pub fn section_is_torsion(x: &DoubleFibration, g: Generator, p: &SurfacePoint<BigComplex>, n: u32) -> Result<bool> {
    let fib = x.fiber_of(g, p)?;
    let e = fib.curve();
    let q = e.mul_unchecked(n as i64, &fib.section);
    let cut = e.precision().unwrap_or(64) as f64 / 4.0;
    Ok(match q {
        Point::Infinity => true,
        Point::Affine(qx, _) => qx.log2_abs_approx() > cut,
    })
}

/// Exceptional points with `lambda(x)` in the window and all three orders at
/// most `w.denominator_bound`. The `lambda` and `mu` parameters of the first
/// two conditions come from the exact-order polynomials; the third condition
/// and all three orders are read from Betti coordinates, and every hit is
/// re-checked by multiplication.
pub fn exceptional_scan(x: &DoubleFibration, w: &ScanWindow, prec: u32) -> Result<Vec<ExceptionalHit>> {
    let bound = w.denominator_bound;
    let mut lambdas = vec![];
    let mut mus = vec![];
    for n in 1..=bound {
        for s in x.torsion_parameters(Generator::Sigma, n, prec)? {
            if w.contains(&s) {
                lambdas.push(s);
            }
        }
        mus.extend(x.torsion_parameters(Generator::Tau, n, prec)?);
    }
    let mut hits = vec![];
    for s in &lambdas {
        for u in &mus {
            // y = sigma(x) lies on the lambda fiber over s and the mu fiber over u.
            for y in x.common_points(s, u)? {
                let Ok(p) = x.apply_power(Generator::Sigma, &y, -1) else { continue };
                let Ok(z) = x.apply_tau(&y) else { continue };
                let o1 = section_order(x, Generator::Sigma, &p, bound)?;
                let o2 = section_order(x, Generator::Tau, &y, bound)?;
                let Ok(o3) = section_order(x, Generator::Sigma, &z, bound) else { continue };
                let (Some(o1), Some(o2), Some(o3)) = (o1, o2, o3) else { continue };
                if section_is_torsion(x, Generator::Sigma, &p, o1)?
                    && section_is_torsion(x, Generator::Tau, &y, o2)?
                    && section_is_torsion(x, Generator::Sigma, &z, o3)?
                {
                    hits.push(ExceptionalHit { s: s.to_decimal_pair(), point: p.to_strings(), orders: (o1, o2, o3) });
                }
            }
        }
    }
    hits.sort_by(|a, b| (a.orders, &a.s, &a.point).cmp(&(b.orders, &b.s, &b.point)));
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::fermat_double_fibration;

    #[test]
    fn bound_one_is_empty() {
        let x = fermat_double_fibration();
        let w = ScanWindow::new((-3.0, 3.0), (-3.0, 3.0), 1.0, 1).unwrap();
        assert!(exceptional_scan(&x, &w, 128).unwrap().is_empty());
    }

    #[test]
    fn torsion_seed_orders() {
        let x = fermat_double_fibration();
        let sd = &x.doubly_torsion_seeds(4, 4, 128).unwrap()[0];
        let p = sd.seed.clone().unwrap();
        assert_eq!(section_order(&x, Generator::Sigma, &p, 8).unwrap(), Some(4));
        assert_eq!(section_order(&x, Generator::Tau, &p, 8).unwrap(), Some(4));
        assert!(section_is_torsion(&x, Generator::Sigma, &p, 4).unwrap());
    }
}
