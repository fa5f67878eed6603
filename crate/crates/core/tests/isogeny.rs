use fibretorsion::elliptic::CurveFamily;
use fibretorsion::isogeny::*;
use fibretorsion::numerics::{poly_roots, BigComplex, Poly, Rational};

const PREC: u32 = 128;

fn sample_points(prec: u32) -> Vec<(BigComplex, BigComplex)> {
    let l = legendre_isogeny_locus(2).unwrap();
    let mut pts = locus_points(&l, &Rational::from((7, 3)), prec).unwrap();
    pts.extend(locus_points(&l, &Rational::from((-5, 2)), prec).unwrap().into_iter().take(2));
    pts
}

#[test]
fn level_two_locus_has_three_isogenous_j_values() {
    let l = legendre_isogeny_locus(2).unwrap();
    let pts = locus_points(&l, &Rational::from((11, 4)), PREC).unwrap();
    let mut js: Vec<BigComplex> = vec![];
    let mut counts: Vec<usize> = vec![];
    for (t, _) in &pts {
        let j = legendre_j(t);
        match js.iter().position(|k| k.dist(&j).to_f64() < 1e-15 * (1.0 + j.abs_f64())) {
            Some(i) => counts[i] += 1,
            None => {
                js.push(j);
                counts.push(1);
            }
        }
    }
    assert_eq!(js.len(), 3);
    assert_eq!(counts, vec![6, 6, 6]);
}

#[test]
fn locus_vanishes_exactly_on_isogenous_pairs() {
    let phi = modular_poly(2).unwrap();
    let l = legendre_isogeny_locus(2).unwrap();
    let t = BigComplex::from_f64(0.37, 0.21, PREC);
    let jt = legendre_j(&t);
    // Y with Phi_2(j(t), Y) = 0, then u with j(u) = Y.
    let coeffs: Vec<BigComplex> = (0..=3)
        .map(|k| {
            let mut c = BigComplex::zero(PREC);
            for i in (0..=3).rev() {
                c = &(&c * &jt) + &BigComplex::from_rational(&Rational::from(phi.coeff(i, k)), PREC);
            }
            c
        })
        .collect();
    for y in poly_roots(&Poly::new(coeffs), PREC).unwrap() {
        // 256 (u^2 - u + 1)^3 - Y u^2 (u - 1)^2 = 0
        let num = Poly::new(vec![256, -768, 1536, -1792, 1536, -768, 256].into_iter().map(|c| BigComplex::from_i64(c, PREC)).collect());
        let den = Poly::new(vec![0, 0, 1, -2, 1].into_iter().map(|c| BigComplex::from_i64(c, PREC)).collect());
        let eq = num.sub(&den.scale(&y));
        for u in poly_roots(&eq, PREC).unwrap() {
            assert_eq!(is_isogenous(&jt, &legendre_j(&u), 2).unwrap(), Some(2));
            let v = l.eval(&t, &u);
            assert!(v.log2_abs_approx() < l.scale_log2(&t, &u) - 90.0);
        }
    }
    let u = BigComplex::from_f64(-0.61, 1.3, PREC);
    assert_eq!(is_isogenous(&jt, &legendre_j(&u), 13).unwrap(), None);
    assert!(l.eval(&t, &u).log2_abs_approx() > l.scale_log2(&t, &u) - 40.0);
}

#[test]
fn no_dependence_on_level_two_samples() {
    let fam = CurveFamily::legendre();
    let s = CoverSection::legendre_default();
    let pts = sample_points(PREC);
    assert_eq!(pts.len(), 20);
    for (t, u) in pts {
        let q = DependenceQuery { t: t.clone(), u: u.clone(), bound: 10, level: 2 };
        let r = dependence_search(&fam, &s, &q, PREC).unwrap();
        assert!(r.is_none(), "{:?}", r);
        let r2 = dependence_search(&fam, &s, &q, 2 * PREC).unwrap();
        assert_eq!(r, r2);
    }
}

#[test]
fn phi2_special_values() {
    let p = modular_poly(2).unwrap();
    assert_eq!(p.eval_rational(&Rational::from(0), &Rational::from(54000)), 0);
    assert_eq!(p.eval_rational(&Rational::from(1728), &Rational::from(287496)), 0);
}

#[test]
fn isogeny_scalar_maps_lattice_with_index_two() {
    use fibretorsion::periods::period_lattice;
    let fam = CurveFamily::legendre();
    for (t, u) in sample_points(PREC).into_iter().take(5) {
        let lt = period_lattice(&fam.fiber_complex(&t).unwrap(), PREC).unwrap();
        let lu = period_lattice(&fam.fiber_complex(&u).unwrap(), PREC).unwrap();
        let xi = isogeny_scalar(&lt, &lu, 2).unwrap();
        for w in [&lt.omega1, &lt.omega2] {
            let (c1, c2) = lu.coordinates(&(&xi * w)).unwrap();
            for c in [c1.to_f64(), c2.to_f64()] {
                assert!((c - c.round()).abs() < 1e-25);
            }
        }
        let ratio = xi.abs_f64().powi(2) * lt.det().to_f64() / lu.det().to_f64();
        assert!((ratio - 2.0).abs() < 1e-12, "{}", ratio);
    }
}
