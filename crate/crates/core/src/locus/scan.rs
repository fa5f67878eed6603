//! Torsion parameter scanning for a section of a one-parameter family.

use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use crate::elliptic::{CurveFamily, Section};
use crate::error::{Error, Result};
use crate::numerics::factor::factor_rational;
use crate::numerics::rational::recognize_rational;
use crate::numerics::{poly_roots, BigComplex, Poly};
use crate::periods::{betti_coords, elliptic_log, period_lattice, BettiCoord, EllipticLog, PeriodBasis};

/// Rectangle in the parameter plane with a sampling density and an order bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Grid points per unit length.
    pub grid_density: f64,
    pub denominator_bound: u32,
}

impl ScanWindow {
    pub fn new(re: (f64, f64), im: (f64, f64), grid_density: f64, denominator_bound: u32) -> Result<Self> {
        let w = ScanWindow {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            grid_density,
            denominator_bound,
        };
        if !(w.re_min < w.re_max && w.im_min < w.im_max) {
            return Err(Error::domain("scan window must be a nondegenerate rectangle"));
        }
        if !(grid_density > 0.0) || denominator_bound < 1 {
            return Err(Error::domain("grid density must be positive and the order bound >= 1"));
        }
        Ok(w)
    }

    pub fn contains(&self, t: &BigComplex) -> bool {
        let (r, i) = (t.re_f64(), t.im_f64());
        let eps = 1e-12;
        r >= self.re_min - eps && r <= self.re_max + eps && i >= self.im_min - eps && i <= self.im_max + eps
    }

    fn grid_shape(&self) -> (usize, usize) {
        let nx = ((self.re_max - self.re_min) * self.grid_density).ceil() as usize + 1;
        let ny = ((self.im_max - self.im_min) * self.grid_density).ceil() as usize + 1;
        (nx, ny)
    }

    fn grid_point(&self, i: usize, j: usize, prec: u32) -> BigComplex {
        let (nx, ny) = self.grid_shape();
        let re = self.re_min + (self.re_max - self.re_min) * i as f64 / (nx - 1).max(1) as f64;
        let im = self.im_min + (self.im_max - self.im_min) * j as f64 / (ny - 1).max(1) as f64;
        BigComplex::from_f64(re, im, prec)
    }
}

/// Evidence that a hit is a genuine torsion parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// The specialization numerator of `psi_n` vanishes exactly at `t0`.
    pub certified: bool,
    /// `t0` itself when it is rational.
    pub exact_t0: Option<Rational>,
    /// Irreducible factor of the numerator having `t0` as a root.
    pub factor: Option<Poly<Integer>>,
    /// `|psi_n numerator(t0)|` at working precision.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionHit {
    pub t0: BigComplex,
    pub order: u32,
    pub betti: BettiCoord,
    /// Numerators of the Betti pair over `order`.
    pub betti_numerators: (i64, i64),
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Default)]
pub struct ScanReport {
    pub hits: Vec<TorsionHit>,
    /// Oracle roots in the window that no refinement reached, per order.
    pub warnings: Vec<CompletenessWarning>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessWarning {
    pub order: u32,
    pub missed: Vec<BigComplex>,
}

/// Tunables of the scanner.
#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub precision: u32,
    pub grid_precision: u32,
    /// Largest denominator tried when recognizing rational parameters.
    pub max_rational_den: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            precision: 256,
            grid_precision: 64,
            max_rational_den: 1 << 20,
        }
    }
}

/// Elliptic logarithm of the section and the lattice at one parameter.
fn section_log(family: &CurveFamily, s: &Section, t: &BigComplex, prec: u32) -> Result<EllipticLog> {
    let e = family.fiber_complex(t)?;
    let basis = period_lattice(&e, prec)?;
    let p = s.point_at_complex(t);
    if !p.x().map_or(true, |x| x.is_finite()) {
        return Err(Error::SingularFiber(t.to_string()));
    }
    elliptic_log(&e, &p, &basis)
}

/// Minimal representative of `n l` modulo the lattice.
fn g_value(l: &EllipticLog, n: u32) -> Result<BigComplex> {
    l.basis.reduce_min(&l.value.mul_int(n as i64))
}

/// Representative of `v` mod the lattice closest to `reference`.
fn nearest_rep(v: &BigComplex, basis: &PeriodBasis, reference: &BigComplex) -> Result<BigComplex> {
    let (_, _, lam) = basis.nearest_vector(&(v - reference))?;
    Ok(v - &lam)
}

/// Representative of `+-v` mod the lattice closest to `reference`.
fn nearest_branch(v: &BigComplex, basis: &PeriodBasis, reference: &BigComplex) -> Result<BigComplex> {
    let mut best: Option<(Float, BigComplex)> = None;
    for cand in [v.clone(), -v.clone()] {
        let (_, _, lam) = basis.nearest_vector(&(&cand - reference))?;
        let w = &cand - &lam;
        let d = w.dist(reference);
        if best.as_ref().map_or(true, |b| d < b.0) {
            best = Some((d, w));
        }
    }
    Ok(best.unwrap().1)
}

/// Sample points with a neighbour structure; `wrap` joins the first and
/// last columns.
struct Patch {
    nx: usize,
    ny: usize,
    wrap: bool,
    /// Whether flags may also come from near-rational Betti values.
    rational_flags: bool,
    points: Vec<BigComplex>,
    logs: Vec<Option<EllipticLog>>,
}

impl Patch {
    fn evaluate(family: &CurveFamily, s: &Section, w: &ScanWindow, points: Vec<BigComplex>, gp: u32) -> Vec<Option<EllipticLog>> {
        points
            .par_iter()
            .map(|t| {
                if !w.contains(t) {
                    return None;
                }
                section_log(family, s, &t.with_prec(gp), gp).ok()
            })
            .collect()
    }

    fn rectangle(family: &CurveFamily, s: &Section, w: &ScanWindow, opts: &ScanOptions) -> Patch {
        let (nx, ny) = w.grid_shape();
        let points: Vec<BigComplex> = (0..nx * ny).map(|k| w.grid_point(k % nx, k / nx, opts.precision)).collect();
        let logs = Patch::evaluate(family, s, w, points.clone(), opts.grid_precision);
        Patch { nx, ny, wrap: false, rational_flags: true, points, logs }
    }

    /// Log-polar grid around a singular parameter, from radius `1/density`
    /// down to `2^-(4N + 8)`, uniform in `log |t - c|` and `arg (t - c)`.
    fn polar(family: &CurveFamily, s: &Section, w: &ScanWindow, opts: &ScanOptions, c: &BigComplex) -> Patch {
        let bound = w.denominator_bound;
        let depth = 4.0 * bound as f64 + 8.0;
        let nx = (8 * bound as usize).clamp(32, 128);
        let step = 2.0 * std::f64::consts::PI / nx as f64;
        let outer = 1.0 / w.grid_density;
        let ny = ((depth * std::f64::consts::LN_2 + outer.ln().max(0.0)) / step).ceil() as usize + 1;
        let prec = opts.precision;
        let mut points = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let r = outer * (-(j as f64) * step).exp();
            for i in 0..nx {
                let th = (i as f64 + 0.5 * (j % 2) as f64) * step;
                points.push(c + &BigComplex::from_f64(r * th.cos(), r * th.sin(), prec));
            }
        }
        let logs = Patch::evaluate(family, s, w, points.clone(), opts.grid_precision + depth as u32);
        Patch { nx, ny, wrap: true, rational_flags: false, points, logs }
    }

    fn neighbours(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = ((k % self.nx) as i64, (k / self.nx) as i64);
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        (-1i64..=1)
            .flat_map(move |dj| (-1i64..=1).map(move |di| (di, dj)))
            .filter(|&(di, dj)| di != 0 || dj != 0)
            .filter_map(move |(di, dj)| {
                let mut ii = i + di;
                let jj = j + dj;
                if self.wrap {
                    ii = ii.rem_euclid(nx);
                }
                if ii < 0 || jj < 0 || ii >= nx || jj >= ny {
                    return None;
                }
                Some((jj * nx + ii) as usize)
            })
    }
}

/// Multiplicity-robust refinement of a zero of `G(t) = n l(t) mod Lambda(t)`
/// (Newton applied to `G / G'`, derivatives by central differences).
fn refine(family: &CurveFamily, s: &Section, n: u32, start: &BigComplex, prec: u32) -> Result<BigComplex> {
    let mut t = start.with_prec(prec);
    let h_exp = -(prec as i32) / 4;
    let h = BigComplex::from_real(&Float::with_val(prec, Float::i_exp(1, h_exp)));
    let step_tol = -(prec as f64) / 3.0;
    let g_tol = -(prec as f64) / 2.0;
    // Smallest relative residual seen, its iterate and how long ago.
    let mut best: Option<(f64, BigComplex)> = None;
    let mut stale = 0;
    for _ in 0..64 {
        let l = section_log(family, s, &t, prec)?;
        let g = g_value(&l, n)?;
        let scale = l.basis.min_norm().to_f64().log2();
        if g.is_zero_exact() || g.log2_abs_approx() < g_tol * 1.6 + scale {
            return Ok(t);
        }
        let rel_g = g.log2_abs_approx() - scale;
        if best.as_ref().map_or(true, |b| rel_g < b.0 - 1.0) {
            best = Some((rel_g, t.clone()));
            stale = 0;
        } else {
            stale += 1;
            if stale >= 4 {
                break;
            }
        }
        let lp = section_log(family, s, &(&t + &h), prec)?;
        let lm = section_log(family, s, &(&t - &h), prec)?;
        // Fix the sign on the logarithm itself: near a zero of G both signs
        // of n l reduce close to g.
        let gp = nearest_rep(&nearest_branch(&lp.value, &lp.basis, &l.value)?.mul_int(n as i64), &lp.basis, &g)?;
        let gm = nearest_rep(&nearest_branch(&lm.value, &lm.basis, &l.value)?.mul_int(n as i64), &lm.basis, &g)?;
        let d1 = (&gp - &gm).div_int(2);
        let d1 = &d1 / &h;
        let d2 = &(&(&gp + &gm) - &g.mul_int(2)) / &(&h * &h);
        let den = &(&d1 * &d1) - &(&g * &d2);
        if den.is_zero_exact() {
            return Err(Error::numeric("degenerate refinement step"));
        }
        let step = &(&g * &d1) / &den;
        t = &t - &step;
        let rel = step.log2_abs_approx() - t.log2_abs_approx().max(0.0);
        if rel < step_tol && g.log2_abs_approx() < g_tol + scale {
            return Ok(t);
        }
        if !t.is_finite() {
            return Err(Error::numeric("refinement diverged"));
        }
    }
    // Stalled: accept the best iterate when it is a root to a third of the precision.
    match best {
        Some((r, t)) if r < step_tol => Ok(t),
        _ => Err(Error::NoConvergence {
            iterations: 64,
            best: t.to_string(),
            residual: best.map_or(f64::NAN, |b| b.0),
        }),
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Numerators `(p, q)` if the Betti pair is `(p/n, q/n)` to tolerance.
fn betti_fraction(b: &BettiCoord, n: u32, tol_log2: f64) -> Option<(i64, i64)> {
    let mut out = [0i64; 2];
    for (k, beta) in [&b.beta1, &b.beta2].into_iter().enumerate() {
        let nb = Float::with_val(beta.prec(), beta * n);
        let r = nb.to_integer()?;
        let err = Float::with_val(beta.prec(), &nb - &r).abs();
        if !err.is_zero() && err.to_f64().log2() > tol_log2 {
            return None;
        }
        out[k] = r.to_i64()?.rem_euclid(n as i64);
    }
    Some((out[0], out[1]))
}

/// Numerator of the `psi_n` specialization along the section.
pub fn psi_numerator(family: &CurveFamily, s: &Section, n: u32) -> Result<Poly<Rational>> {
    Ok(s.psi_specialization(family, n)?.num().clone())
}

/// Squarefree polynomial whose roots are exactly the parameters on smooth
/// fibers where the section has order exactly `n`.
pub fn exact_order_oracle(family: &CurveFamily, s: &Section, n: u32) -> Result<Poly<Rational>> {
    let p = psi_numerator(family, s, n)?;
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Poly::constant(Rational::from(1)));
    }
    let mut q = p.squarefree_part();
    for d in 1..n {
        if n % d == 0 {
            let pd = psi_numerator(family, s, d)?;
            if pd.is_zero_poly() {
                continue;
            }
            let g = q.gcd(&pd);
            q = q.div_rem(&g).0;
        }
    }
    let disc = family.discriminant().num().clone();
    let g = q.gcd(&disc);
    q = q.div_rem(&g).0;
    Ok(q.monic())
}

/// Roots of the exact-order oracle lying in the window.
pub fn oracle_roots(family: &CurveFamily, s: &Section, n: u32, w: &ScanWindow, prec: u32) -> Result<Vec<BigComplex>> {
    let q = exact_order_oracle(family, s, n)?;
    if q.degree().unwrap_or(0) == 0 {
        return Ok(vec![]);
    }
    let roots = poly_roots(&q.to_complex(prec), prec)?;
    Ok(roots.into_iter().filter(|r| w.contains(r)).collect())
}

fn certify(
    family: &CurveFamily,
    s: &Section,
    n: u32,
    t0: &BigComplex,
    opts: &ScanOptions,
) -> Result<Certificate> {
    let prec = opts.precision;
    let num = psi_numerator(family, s, n)?;
    let residual = num.eval_complex(t0).abs_f64();
    let tol = -(prec as f64) / 4.0;
    if t0.im_f64().abs() == 0.0 || t0.im().clone().abs().to_f64().log2() < tol {
        if let Some(q) = recognize_rational(t0.re(), &Integer::from(opts.max_rational_den)) {
            let close = (&BigComplex::from_rational(&q, prec) - t0).log2_abs_approx() < tol;
            if close && num.eval(&q).is_zero() {
                return Ok(Certificate {
                    certified: true,
                    exact_t0: Some(q.clone()),
                    factor: Some(Poly::new(vec![-q.numer().clone(), q.denom().clone()])),
                    residual: 0.0,
                });
            }
        }
    }
    for (f, _) in factor_rational(&num)? {
        let fz = f.eval_complex(t0);
        let scale: f64 = f
            .coeffs()
            .iter()
            .map(|c| c.to_f64().abs())
            .sum::<f64>()
            .max(1.0)
            * (1.0 + t0.abs_f64()).powi(f.degree().unwrap_or(0) as i32);
        if fz.log2_abs_approx() - scale.log2() < -(prec as f64) / 3.0 {
            return Ok(Certificate {
                certified: true,
                exact_t0: None,
                factor: Some(f),
                residual,
            });
        }
    }
    Ok(Certificate {
        certified: false,
        exact_t0: None,
        factor: None,
        residual,
    })
}

/// Grid scan, refinement, deduplication and certification for every order
/// `n <= w.denominator_bound`. Singular parameters near the window get an
/// extra log-polar patch, since torsion parameters accumulate there.
pub fn scan_torsion(family: &CurveFamily, s: &Section, w: &ScanWindow, opts: &ScanOptions) -> Result<ScanReport> {
    let mut patches = vec![Patch::rectangle(family, s, w, opts)];
    let reach = 1.0 / w.grid_density;
    for c in family.singular_parameters(opts.precision)? {
        let (re, im) = (c.re_f64(), c.im_f64());
        let dx = (w.re_min - re).max(re - w.re_max).max(0.0);
        let dy = (w.im_min - im).max(im - w.im_max).max(0.0);
        if dx.hypot(dy) <= reach {
            patches.push(Patch::polar(family, s, w, opts, &c));
        }
    }

    let mut report = ScanReport::default();
    for n in 1..=w.denominator_bound {
        let hits = scan_order(family, s, w, opts, &patches, n)?;
        let oracle = oracle_roots(family, s, n, w, opts.precision)?;
        let radius = -(opts.precision as f64) / 4.0;
        let missed: Vec<BigComplex> = oracle
            .into_iter()
            .filter(|r| !hits.iter().any(|h| (&h.t0 - r).log2_abs_approx() < radius + 8.0))
            .collect();
        if !missed.is_empty() {
            report.warnings.push(CompletenessWarning { order: n, missed });
        }
        report.hits.extend(hits);
    }
    Ok(report)
}

fn scan_order(
    family: &CurveFamily,
    s: &Section,
    w: &ScanWindow,
    opts: &ScanOptions,
    patches: &[Patch],
    n: u32,
) -> Result<Vec<TorsionHit>> {
    let near_rational = |l: &EllipticLog| -> bool {
        let b = match betti_coords(l) {
            Ok(b) => b,
            Err(_) => return false,
        };
        let (b1, b2) = b.to_f64();
        let nf = n as f64;
        let d = ((b1 * nf).round() / nf - b1).abs().max(((b2 * nf).round() / nf - b2).abs());
        d <= 1.0 / (4.0 * nf * w.grid_density)
    };
    let mut flags = Vec::new();
    for patch in patches {
        let values: Vec<Option<f64>> = patch
            .logs
            .iter()
            .map(|l| {
                let l = l.as_ref()?;
                let g = g_value(l, n).ok()?;
                Some(g.abs_f64() / l.basis.min_norm().to_f64())
            })
            .collect();
        for (k, v) in values.iter().enumerate() {
            let Some(v) = v else { continue };
            let local_min = patch.neighbours(k).all(|m| values[m].map_or(true, |u| u >= *v));
            if local_min || (patch.rational_flags && near_rational(patch.logs[k].as_ref().unwrap())) {
                flags.push(patch.points[k].clone());
            }
        }
    }

    let prec = opts.precision;
    let refined: Vec<BigComplex> = flags
        .par_iter()
        .filter_map(|t| refine(family, s, n, t, prec).ok())
        .collect();

    let radius = -(prec as f64) / 4.0;
    let mut hits: Vec<TorsionHit> = Vec::new();
    for t0 in refined {
        if !w.contains(&t0) {
            continue;
        }
        if hits.iter().any(|h| (&h.t0 - &t0).log2_abs_approx() < radius) {
            continue;
        }
        let l = match section_log(family, s, &t0, prec) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let betti = betti_coords(&l)?;
        let (p, q) = match betti_fraction(&betti, n, radius) {
            Some(pq) => pq,
            None => continue,
        };
        if gcd_i64(gcd_i64(p, q), n as i64) != 1 {
            continue;
        }
        let certificate = certify(family, s, n, &t0, opts)?;
        let t0 = match &certificate.exact_t0 {
            Some(q) => BigComplex::from_rational(q, prec),
            None => t0,
        };
        hits.push(TorsionHit {
            t0,
            order: n,
            betti,
            betti_numerators: (p, q),
            certificate,
        });
    }
    hits.sort_by(|a, b| a.t0.cmp_lex(&b.t0));
    Ok(hits)
}

/// Number of certified hits with order at most `T`, for every `T` up to the
/// window's bound.
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub bound: u32,
    pub count: usize,
    pub series: Vec<(u32, usize)>,
    pub window: ScanWindow,
}

pub fn count_rational(family: &CurveFamily, s: &Section, w: &ScanWindow, bound: u32, opts: &ScanOptions) -> Result<CountReport> {
    let mut wb = w.clone();
    wb.denominator_bound = bound.max(1);
    let report = scan_torsion(family, s, &wb, opts)?;
    let series: Vec<(u32, usize)> = (1..=bound)
        .map(|t| {
            let c = report
                .hits
                .iter()
                .filter(|h| h.order <= t && h.certificate.certified)
                .count();
            (t, c)
        })
        .collect();
    let count = series.last().map_or(0, |s| s.1);
    Ok(CountReport {
        bound,
        count,
        series,
        window: w.clone(),
    })
}

/// `true` when `|n s(t0)|` is the point at infinity to residual tolerance.
pub fn verify_hit(family: &CurveFamily, s: &Section, hit: &TorsionHit) -> Result<bool> {
    let e = family.fiber_complex(&hit.t0)?;
    let p = s.point_at_complex(&hit.t0);
    let q = e.mul_unchecked(hit.order as i64, &p);
    Ok(q.is_infinity() || q.x().map_or(false, |x| x.log2_abs_approx() > e.precision().unwrap_or(64) as f64 / 4.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_oracles() {
        let fam = CurveFamily::demo();
        let s = Section::demo();
        assert_eq!(exact_order_oracle(&fam, &s, 3).unwrap(), Poly::from_i64s(&[0, 1]));
        let q4 = exact_order_oracle(&fam, &s, 4).unwrap();
        assert_eq!(q4, Poly::from_i64s(&[8, 0, 0, 1]));
        assert_eq!(exact_order_oracle(&fam, &s, 2).unwrap().degree(), Some(0));
    }

    #[test]
    fn demo_window_orders_three_and_four() {
        let fam = CurveFamily::demo();
        let s = Section::demo();
        let w = ScanWindow::new((-3.0, 1.0), (-1.0, 1.0), 4.0, 4).unwrap();
        let opts = ScanOptions {
            precision: 128,
            ..Default::default()
        };
        let r = scan_torsion(&fam, &s, &w, &opts).unwrap();
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        let got: Vec<(u32, Option<Rational>)> =
            r.hits.iter().map(|h| (h.order, h.certificate.exact_t0.clone())).collect();
        assert_eq!(
            got,
            vec![(3, Some(Rational::from(0))), (4, Some(Rational::from(-2)))]
        );
        for h in &r.hits {
            assert!(verify_hit(&fam, &s, h).unwrap());
        }
    }
}
