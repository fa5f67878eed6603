use rug::ops::Pow;
use rug::Rational;
use serde::Serialize;

use crate::elliptic::{Curve, CurveFamily, Point, Section};
use crate::error::{Error, Result};
use crate::numerics::{negligible, BigComplex, Field, RatFunc, Ring};

use super::form::Form;
use super::nagell::{inv3, mat_vec, max_log2, pick, CubicReduction, Vec3};
use super::surface::{Coord, Line, QuarticSurface, SurfacePoint};

/// Pencil of planes `l1 - s l2 = 0` through an axis line, with a zero-section
/// line and a translation-section line.
#[derive(Clone, Debug, PartialEq)]
pub struct LinePencilFibration {
    pub name: String,
    pub axis: Line,
    /// Linear forms vanishing on the axis; the parameter is `l1 / l2`.
    pub forms: [[Rational; 4]; 2],
    pub zero_section: Line,
    pub translation_section: Line,
}

fn dot<F: Field>(l: &[Rational; 4], p: &[F; 4]) -> F {
    let mut acc = p[0].zero_like();
    for i in 0..4 {
        acc = acc.add_ref(&p[i].mul_ref(&p[i].from_rational_like(&l[i])));
    }
    acc
}

impl LinePencilFibration {
    pub fn new(
        name: impl Into<String>,
        axis: Line,
        forms: [[i64; 4]; 2],
        zero_section: Line,
        translation_section: Line,
    ) -> Result<Self> {
        let forms = forms.map(|f| f.map(Rational::from));
        for p in &axis.points {
            for f in &forms {
                if dot(f, p) != 0 {
                    return Err(Error::domain("pencil forms must vanish on the axis"));
                }
            }
        }
        if axis == zero_section || axis == translation_section || zero_section == translation_section {
            return Err(Error::domain("axis and section lines must be distinct"));
        }
        Ok(LinePencilFibration { name: name.into(), axis, forms, zero_section, translation_section })
    }

    /// Pencil parameter of `p`; `None` on the axis or at `s = infinity`.
    pub fn parameter<F: Field>(&self, p: &[F; 4]) -> Result<F> {
        let l1 = dot(&self.forms[0], p);
        let l2 = dot(&self.forms[1], p);
        let scale = max_log2(p);
        if negligible(&l2, scale, 0.5) {
            if negligible(&l1, scale, 0.5) {
                return Err(Error::Indeterminate(format!("point lies on the {} axis", self.name)));
            }
            return Err(Error::Indeterminate(format!("{} parameter is infinite", self.name)));
        }
        Ok(l1.div_ref(&l2))
    }

    /// Intersection of a line with the plane of parameter `s`.
    fn meet<F: Field>(&self, line: &Line, s: &F) -> Result<[F; 4]> {
        let h = |q: &[Rational; 4]| {
            let q: [F; 4] = q.clone().map(|c| s.from_rational_like(&c));
            dot(&self.forms[0], &q).sub_ref(&s.mul_ref(&dot(&self.forms[1], &q)))
        };
        let (h0, h1) = (h(&line.points[0]), h(&line.points[1]));
        let p = line.point_at(&h1, &h0.neg_ref());
        if p.iter().all(|c| c.is_zero()) {
            return Err(Error::SingularFiber(format!("line {} lies in the plane", line.name)));
        }
        Ok(p)
    }
}

/// Weierstrass model of one fiber with the plane-to-model transports.
#[derive(Clone, Debug)]
pub struct Fiber<F> {
    pub parameter: F,
    /// Plane basis in P^3: two axis points and the zero-section point.
    frame: [[F; 4]; 3],
    rows: [usize; 3],
    frame_inv: [Vec3<F>; 3],
    pub cubic: Form<F>,
    reduction: CubicReduction<F>,
    /// Image of the translation-section point.
    pub section: Point<F>,
}

impl<F: Field> Fiber<F> {
    pub fn curve(&self) -> &Curve<F> {
        self.reduction.curve()
    }

    fn to_plane(&self, p: &[F; 4]) -> Result<Vec3<F>> {
        let sel = [p[self.rows[0]].clone(), p[self.rows[1]].clone(), p[self.rows[2]].clone()];
        let abc = mat_vec(&self.frame_inv, &sel);
        let back = self.from_plane(&abc);
        let scale = max_log2(p);
        let ok = (0..4).all(|i| negligible(&back[i].sub_ref(&p[i]), scale, 0.5));
        if !ok {
            return Err(Error::domain("point is not in the fiber plane"));
        }
        Ok(abc)
    }

    fn from_plane(&self, abc: &Vec3<F>) -> [F; 4] {
        std::array::from_fn(|i| {
            self.frame[0][i]
                .mul_ref(&abc[0])
                .add_ref(&self.frame[1][i].mul_ref(&abc[1]))
                .add_ref(&self.frame[2][i].mul_ref(&abc[2]))
        })
    }

    /// Surface point of this fiber to the Weierstrass model.
    pub fn to_weierstrass(&self, p: &[F; 4]) -> Result<Point<F>> {
        let abc = self.to_plane(p)?;
        let scale = max_log2(&abc);
        if negligible(&abc[2], scale, 0.5) {
            return Err(Error::Indeterminate("point lies on the pencil axis".into()));
        }
        self.reduction.forward(&abc)
    }

    pub fn from_weierstrass(&self, w: &Point<F>) -> [F; 4] {
        self.from_plane(&self.reduction.backward(w))
    }

    /// Round trip through the plane cubic; for tests and diagnostics.
    pub fn plane_point(&self, p: &[F; 4]) -> Result<Vec3<F>> {
        self.to_plane(p)
    }
}

impl LinePencilFibration {
    pub fn fiber<F: Field>(&self, surface: &QuarticSurface, s: &F) -> Result<Fiber<F>> {
        let a1: [F; 4] = self.axis.points[0].clone().map(|c| s.from_rational_like(&c));
        let a2: [F; 4] = self.axis.points[1].clone().map(|c| s.from_rational_like(&c));
        let o = self.meet(&self.zero_section, s)?;
        let frame = [a1, a2, o];
        let subs: Vec<Form<F>> = (0..4)
            .map(|i| Form::linear(&[frame[0][i].clone(), frame[1][i].clone(), frame[2][i].clone()]))
            .collect();
        let quartic = surface.form().to_field(s).substitute(&subs);
        let (cubic, _axis_part) = quartic.div_var(2);
        let triples = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        let dets: Vec<F> = triples
            .iter()
            .map(|r| {
                let m: [Vec3<F>; 3] = std::array::from_fn(|i| std::array::from_fn(|k| frame[k][r[i]].clone()));
                super::nagell::det3(&m)
            })
            .collect();
        let t = pick(&dets).ok_or_else(|| Error::SingularFiber("degenerate fiber plane".into()))?;
        let rows = triples[t];
        let m: [Vec3<F>; 3] = std::array::from_fn(|i| std::array::from_fn(|k| frame[k][rows[i]].clone()));
        let frame_inv = inv3(&m)?;
        let one = s.one_like();
        let zero = s.zero_like();
        let reduction = CubicReduction::new(&cubic, &[zero.clone(), zero, one]).map_err(|e| match e {
            Error::SingularFiber(m) => Error::SingularFiber(format!("{} fiber: {}", self.name, m)),
            other => other,
        })?;
        let mut fib = Fiber {
            parameter: s.clone(),
            frame,
            rows,
            frame_inv,
            cubic,
            reduction,
            section: Point::Infinity,
        };
        let t = self.meet(&self.translation_section, s)?;
        fib.section = fib.to_weierstrass(&t)?;
        Ok(fib)
    }
}

/// Which pencil a generator acts along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    Sigma,
    Tau,
}

/// Quartic surface with two elliptic pencils.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleFibration {
    pub surface: QuarticSurface,
    pub lambda_fib: LinePencilFibration,
    pub mu_fib: LinePencilFibration,
}

/// The Fermat quartic `x^4 + y^4 = z^4 + w^4` with two pencils built from
/// its rational lines.
pub fn fermat_double_fibration() -> DoubleFibration {
    let surface = QuarticSurface::fermat();
    let lambda_fib = LinePencilFibration::new(
        "lambda",
        Line::new("x=z,y=w", [1, 0, 1, 0], [0, 1, 0, 1]),
        [[1, 0, -1, 0], [0, 1, 0, -1]],
        Line::new("x=-z,y=-w", [1, 0, -1, 0], [0, 1, 0, -1]),
        Line::new("x=w,y=-z", [1, 0, 0, 1], [0, 1, -1, 0]),
    )
    .unwrap();
    let mu_fib = LinePencilFibration::new(
        "mu",
        Line::new("x=w,y=z", [1, 0, 0, 1], [0, 1, 1, 0]),
        [[1, 0, 0, -1], [0, 1, -1, 0]],
        Line::new("x=-w,y=-z", [1, 0, 0, -1], [0, 1, -1, 0]),
        Line::new("x=z,y=-w", [1, 0, 1, 0], [0, 1, 0, -1]),
    )
    .unwrap();
    DoubleFibration { surface, lambda_fib, mu_fib }
}

impl DoubleFibration {
    pub fn pencil(&self, g: Generator) -> &LinePencilFibration {
        match g {
            Generator::Sigma => &self.lambda_fib,
            Generator::Tau => &self.mu_fib,
        }
    }

    pub fn lambda<F: Coord>(&self, p: &SurfacePoint<F>) -> Result<F> {
        self.lambda_fib.parameter(p.coords())
    }

    pub fn mu<F: Coord>(&self, p: &SurfacePoint<F>) -> Result<F> {
        self.mu_fib.parameter(p.coords())
    }

    pub fn lambda_fiber<F: Field>(&self, s: &F) -> Result<Fiber<F>> {
        self.lambda_fib.fiber(&self.surface, s)
    }

    pub fn mu_fiber<F: Field>(&self, s: &F) -> Result<Fiber<F>> {
        self.mu_fib.fiber(&self.surface, s)
    }

    /// Fiber of `p` for the pencil of `g`.
    pub fn fiber_of<F: Coord>(&self, g: Generator, p: &SurfacePoint<F>) -> Result<Fiber<F>> {
        let pencil = self.pencil(g);
        let s = pencil.parameter(p.coords())?;
        pencil.fiber(&self.surface, &s)
    }

    /// `p + k * section` on the fiber of `p` (negative `k` subtracts).
    pub fn apply_power<F: Coord>(&self, g: Generator, p: &SurfacePoint<F>, k: i64) -> Result<SurfacePoint<F>> {
        let fib = self.fiber_of(g, p)?;
        let w = fib.to_weierstrass(p.coords())?;
        let shift = fib.curve().mul_unchecked(k, &fib.section);
        let r = fib.curve().add_unchecked(&w, &shift);
        let q = fib.from_weierstrass(&r);
        if q.iter().all(|c| c.is_zero()) {
            return Err(Error::Indeterminate("image is not a point".into()));
        }
        let q = SurfacePoint::new_unchecked(q);
        if !self.surface.contains(q.coords()) {
            return Err(Error::numeric("image left the surface"));
        }
        Ok(q)
    }

    pub fn apply_sigma<F: Coord>(&self, p: &SurfacePoint<F>) -> Result<SurfacePoint<F>> {
        self.apply_power(Generator::Sigma, p, 1)
    }

    pub fn apply_tau<F: Coord>(&self, p: &SurfacePoint<F>) -> Result<SurfacePoint<F>> {
        self.apply_power(Generator::Tau, p, 1)
    }

    /// Point of the `g`-fiber over `s` whose Weierstrass abscissa is `x` in
    /// units of `max(|a|^(1/2), |b|^(1/3))`.
    pub fn sample_point(&self, g: Generator, s: &BigComplex, x: &BigComplex) -> Result<SurfacePoint<BigComplex>> {
        let fib = self.pencil(g).fiber(&self.surface, s)?;
        let c = fib.curve();
        let unit = (c.a().log2_abs_approx() / 2.0).max(c.b().log2_abs_approx() / 3.0);
        let x = if unit.is_finite() { x.mul_ref(&BigComplex::from_f64(unit.exp2(), 0.0, x.prec())) } else { x.clone() };
        let y = c.rhs(&x).sqrt();
        let q = fib.from_weierstrass(&Point::Affine(x.clone(), y));
        SurfacePoint::new(&self.surface, q)
    }

    /// Weierstrass family over `Q(s)` with the translation section, for the
    /// pencil of `g`. The model is rescaled by `(x, y) -> (x/u^2, y/u^3)`
    /// with `u = c s^k` as large as keeps `a, b` polynomial, so fibers agree
    /// with [`LinePencilFibration::fiber`] up to isomorphism for `s != 0`.
    pub fn symbolic_family(&self, g: Generator) -> Result<(CurveFamily, Section)> {
        let s = RatFunc::var();
        let fib = self.pencil(g).fiber(&self.surface, &s)?;
        let (a, b) = (fib.curve().a(), fib.curve().b());
        let (x, y) = match &fib.section {
            Point::Affine(x, y) => (x.clone(), y.clone()),
            Point::Infinity => return Err(Error::domain("translation section coincides with the zero section")),
        };
        let u = rescaling(a, b);
        let u2 = u.mul_ref(&u);
        let u4 = u2.mul_ref(&u2);
        let fam = CurveFamily::new(
            a.div_ref(&u4),
            b.div_ref(&u4.mul_ref(&u2)),
            format!("fermat-{}", self.pencil(g).name),
        )?;
        let sec = Section::new(&fam, x.div_ref(&u2), y.div_ref(&u2.mul_ref(&u)))?;
        Ok((fam, sec))
    }
}

/// `u = c s^k` with `u^4 | a` and `u^6 | b` for polynomial `a, b`; `c` is a
/// product of small primes.
fn rescaling(a: &RatFunc, b: &RatFunc) -> RatFunc {
    if !a.is_polynomial() || !b.is_polynomial() {
        return RatFunc::constant(Rational::from(1));
    }
    let val = |p: &crate::numerics::Poly<Rational>| if p.is_zero_poly() { u32::MAX } else { p.valuation() as u32 };
    let k = (val(a.num()) / 4).min(val(b.num()) / 6);
    let k = if k == u32::MAX / 4 { 0 } else { k };
    let pval = |p: &crate::numerics::Poly<Rational>, q: u32| -> u32 {
        p.coeffs()
            .iter()
            .filter(|c| **c != 0)
            .map(|c| {
                let (n, d) = (c.numer(), c.denom());
                if *d != 1 && d.is_divisible_u(q) {
                    return 0;
                }
                let mut n = n.clone().abs();
                let mut e = 0;
                while n.is_divisible_u(q) {
                    n /= q;
                    e += 1;
                }
                e
            })
            .min()
            .unwrap_or(u32::MAX)
    };
    let mut c = rug::Integer::from(1);
    for q in [2u32, 3, 5, 7, 11, 13] {
        let e = (pval(a.num(), q) / 4).min(pval(b.num(), q) / 6);
        if e < u32::MAX / 6 {
            c *= rug::Integer::from(q).pow(e);
        }
    }
    let mut coeffs = vec![Rational::new(); k as usize + 1];
    coeffs[k as usize] = Rational::from(c);
    RatFunc::from_poly(crate::numerics::Poly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_lie_on_the_surface() {
        let x = fermat_double_fibration();
        for f in [&x.lambda_fib, &x.mu_fib] {
            for l in [&f.axis, &f.zero_section, &f.translation_section] {
                assert!(l.lies_on(&x.surface), "{}", l.name);
            }
        }
        let p = SurfacePoint::from_i64(&x.surface, [1, 1, 1, 1]).unwrap();
        assert!(x.lambda(&p).is_err());
    }

    #[test]
    fn exact_fiber_transport() {
        let x = fermat_double_fibration();
        let e = SurfacePoint::from_i64(&x.surface, [59, 158, 133, 134]).unwrap();
        let s = x.lambda(&e).unwrap();
        let fib = x.lambda_fiber(&s).unwrap();
        let w = fib.to_weierstrass(e.coords()).unwrap();
        assert!(fib.curve().contains(&w));
        assert!(fib.curve().contains(&fib.section));
        let back = SurfacePoint::new_unchecked(fib.from_weierstrass(&w));
        assert_eq!(back, e);
        let o = fib.from_weierstrass(&Point::Infinity);
        assert!(fib.to_weierstrass(&o).unwrap().is_infinity());
        let q = x.apply_sigma(&e).unwrap();
        assert_eq!(x.lambda(&q).unwrap(), s);
        assert_eq!(x.apply_power(Generator::Sigma, &q, -1).unwrap(), e);
    }

    #[test]
    fn symbolic_family_is_minimized() {
        let x = fermat_double_fibration();
        let (fam, sec) = x.symbolic_family(Generator::Sigma).unwrap();
        // y^2 = x^3 - 3 s^4 x - s^2 (1 + s^8), section x = 1 + s^2 + s^4
        assert_eq!(fam.a().num().coeffs().len(), 5);
        assert_eq!(*fam.a().num().coeffs().last().unwrap(), -3);
        assert_eq!(fam.b().num().degree(), Some(10));
        assert_eq!(sec.x().num().degree(), Some(4));
    }
}
