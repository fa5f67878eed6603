use fibretorsion::cli::RunConfig;
use fibretorsion::elliptic::{Curve, CurveFamily, Point, Section};
use fibretorsion::fibration::*;
use fibretorsion::isogeny::modular_poly;
use fibretorsion::numerics::{BigComplex, Poly, Rational};
use fibretorsion::periods::{betti_coords, elliptic_log, period_lattice};
use proptest::prelude::*;

const COUNT_CONFIG: &str = include_str!("../configs/count_demo.json");

fn rat() -> impl Strategy<Value = Rational> {
    (-30i64..30, 1i64..8).prop_map(|(p, q)| Rational::from((p, q)))
}

/// A curve through two given rational points with distinct x.
fn curve_through(p: &(Rational, Rational), q: &(Rational, Rational)) -> Option<Curve<Rational>> {
    let dx = Rational::from(&q.0 - &p.0);
    if dx == 0 {
        return None;
    }
    let cube = |x: &Rational| Rational::from(x * x) * x;
    let sq = |x: &Rational| Rational::from(x * x);
    let a = (sq(&q.1) - sq(&p.1) - cube(&q.0) + cube(&p.0)) / dx;
    let b = sq(&p.1) - cube(&p.0) - Rational::from(&a * &p.0);
    Curve::new(a, b).ok()
}

fn point(c: &(Rational, Rational)) -> Point<Rational> {
    Point::affine(c.0.clone(), c.1.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_abelian(p in (rat(), rat()), q in (rat(), rat())) {
        let Some(e) = curve_through(&p, &q) else { return Ok(()) };
        let (p, q) = (point(&p), point(&q));
        prop_assert!(e.contains(&p) && e.contains(&q));
        let pq = e.add_unchecked(&p, &q);
        prop_assert!(e.contains(&pq));
        prop_assert_eq!(&pq, &e.add_unchecked(&q, &p));
        let r = e.double(&q);
        prop_assert_eq!(e.add_unchecked(&pq, &r), e.add_unchecked(&p, &e.add_unchecked(&q, &r)));
        prop_assert!(e.add_unchecked(&p, &e.neg(&p)).is_infinity());
    }

    #[test]
    fn scalar_multiplication_is_linear(p in (rat(), rat()), q in (rat(), rat()), m in -3i64..4, n in -3i64..4) {
        let Some(e) = curve_through(&p, &q) else { return Ok(()) };
        let p = point(&p);
        let lhs = e.add_unchecked(&e.mul_unchecked(m, &p), &e.mul_unchecked(n, &p));
        prop_assert_eq!(&lhs, &e.mul_unchecked(m + n, &p));
        prop_assert_eq!(e.mul_unchecked(m, &e.mul_unchecked(n, &p)), e.mul_unchecked(m * n, &p));
    }

    #[test]
    fn modular_polynomials_are_symmetric(n in prop::sample::select(vec![2u32, 3, 5]), x in rat(), y in rat()) {
        let phi = modular_poly(n).unwrap();
        prop_assert_eq!(phi.eval_rational(&x, &y), phi.eval_rational(&y, &x));
    }

    #[test]
    fn division_with_remainder(f in prop::collection::vec(-9i64..9, 1..6), g in prop::collection::vec(-9i64..9, 2..5), r in prop::collection::vec(-9i64..9, 0..1)) {
        let g = Poly::from_i64s(&g);
        let Some(dg) = g.degree() else { return Ok(()) };
        prop_assume!(dg >= 1);
        let (f, r) = (Poly::from_i64s(&f), Poly::from_i64s(&r));
        let (q, rem) = f.mul(&g).add(&r).div_rem(&g);
        prop_assert_eq!(q, f);
        prop_assert_eq!(rem, r);
    }

    #[test]
    fn betti_coordinates_are_additive(re in -2.9f64..0.9, im in 0.05f64..0.95, n in 2i64..6) {
        let prec = 128;
        let fam = CurveFamily::demo();
        let t = BigComplex::from_f64(re, im, prec);
        let e = fam.fiber_complex(&t).unwrap();
        let p = Section::demo().point_at_complex(&t);
        let np = e.mul_unchecked(n, &p);
        prop_assume!(!np.is_infinity());
        let basis = period_lattice(&e, prec).unwrap();
        let b = betti_coords(&elliptic_log(&e, &p, &basis).unwrap()).unwrap().to_f64();
        let bn = betti_coords(&elliptic_log(&e, &np, &basis).unwrap()).unwrap().to_f64();
        let wrap = |x: f64| x - x.round();
        prop_assert!(wrap(bn.0 - n as f64 * b.0).abs() < 1e-12);
        prop_assert!(wrap(bn.1 - n as f64 * b.1).abs() < 1e-12);
    }

    #[test]
    fn fibre_translations_invert(sr in -3.0f64..3.0, si in -3.0f64..3.0, xr in -2.0f64..2.0, xi in -2.0f64..2.0, k in 1i64..6, tau in any::<bool>()) {
        let prec = 128;
        let x = fermat_double_fibration();
        let g = if tau { Generator::Tau } else { Generator::Sigma };
        let Ok(p) = x.sample_point(g, &BigComplex::from_f64(sr, si, prec), &BigComplex::from_f64(xr, xi, prec)) else { return Ok(()) };
        let Ok(q) = x.apply_power(g, &p, k) else { return Ok(()) };
        let Ok(back) = x.apply_power(g, &q, -k) else { return Ok(()) };
        prop_assert!(p.distance(&back) < 1e-20);
    }

    #[test]
    fn unknown_config_fields_are_rejected(key in "[a-z_]{3,12}") {
        let base: serde_json::Value = serde_json::from_str(COUNT_CONFIG).unwrap();
        prop_assume!(base.get(&key).is_none() && key != "deterministic");
        prop_assert!(RunConfig::from_value(base.clone()).is_ok());
        let mut bad = base;
        bad[&key] = serde_json::json!(1);
        prop_assert!(RunConfig::from_value(bad).is_err());
    }
}
