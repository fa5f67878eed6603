use fibretorsion::elliptic::Point;
use fibretorsion::fibration::*;
use fibretorsion::numerics::{BigComplex, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREC: u32 = 128;
const TOL: f64 = 1e-25;

fn random_complex(rng: &mut ChaCha8Rng, r: f64) -> BigComplex {
    BigComplex::from_f64(rng.gen_range(-r..r), rng.gen_range(-r..r), PREC)
}

/// 100 random points, half on lambda fibers and half on mu fibers.
fn random_points(x: &DoubleFibration, seed: u64) -> Vec<(Generator, SurfacePoint<BigComplex>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    while out.len() < 100 {
        let g = if out.len() % 2 == 0 { Generator::Sigma } else { Generator::Tau };
        let s = random_complex(&mut rng, 3.0);
        let u = random_complex(&mut rng, 2.0);
        if let Ok(p) = x.sample_point(g, &s, &u) {
            out.push((g, p));
        }
    }
    out
}

fn point_dist(p: &Point<BigComplex>, q: &Point<BigComplex>) -> f64 {
    match (p, q) {
        (Point::Infinity, Point::Infinity) => 0.0,
        (Point::Affine(x1, y1), Point::Affine(x2, y2)) => {
            let scale = 1.0 + x1.abs_f64() + y1.abs_f64();
            (x1.dist(x2).to_f64() + y1.dist(y2).to_f64()) / scale
        }
        _ => f64::INFINITY,
    }
}

#[test]
fn nagell_transport_round_trips() {
    let x = fermat_double_fibration();
    for (g, p) in random_points(&x, 1) {
        let fib = x.fiber_of(g, &p).unwrap();
        let w = fib.to_weierstrass(p.coords()).unwrap();
        assert!(fib.curve().contains(&w));
        let back = SurfacePoint::new_unchecked(fib.from_weierstrass(&w));
        assert!(p.distance(&back) < TOL, "{:?}", p.to_strings());
        let again = fib.to_weierstrass(back.coords()).unwrap();
        assert!(point_dist(&w, &again) < TOL);
        assert!(x.surface.contains(back.coords()));
    }
}

#[test]
fn translations_preserve_their_fibers() {
    let x = fermat_double_fibration();
    for (_, p) in random_points(&x, 2) {
        let q = x.apply_sigma(&p).unwrap();
        assert!(x.lambda(&q).unwrap().dist(&x.lambda(&p).unwrap()).to_f64() < TOL);
        let r = x.apply_tau(&p).unwrap();
        assert!(x.mu(&r).unwrap().dist(&x.mu(&p).unwrap()).to_f64() < TOL);
        assert!(x.surface.contains(q.coords()) && x.surface.contains(r.coords()));
        let back = x.apply_power(Generator::Sigma, &q, -1).unwrap();
        assert!(back.distance(&p) < TOL);
        let back = x.apply_power(Generator::Tau, &r, -1).unwrap();
        assert!(back.distance(&p) < TOL);
    }
}

#[test]
fn iterates_are_multiples_of_the_section() {
    let x = fermat_double_fibration();
    for g in [Generator::Sigma, Generator::Tau] {
        let s = BigComplex::from_f64(2.0, 0.0, PREC);
        let p = x.sample_point(g, &s, &BigComplex::from_f64(0.3, 0.7, PREC)).unwrap();
        let fib = x.fiber_of(g, &p).unwrap();
        let w = fib.to_weierstrass(p.coords()).unwrap();
        let mut q = p.clone();
        for k in 1..=20 {
            q = x.apply_power(g, &q, 1).unwrap();
            let expected = fib.curve().add_unchecked(&w, &fib.curve().mul_unchecked(k, &fib.section));
            let got = fib.to_weierstrass(q.coords()).unwrap();
            assert!(point_dist(&got, &expected) < 1e-20, "k = {}", k);
        }
    }
}

#[test]
fn j_invariant_varies() {
    let x = fermat_double_fibration();
    let js: Vec<BigComplex> = [2, 4, 5, 7, 8, 10, 11, 13, 14, 16]
        .into_iter()
        .map(|k| {
            let s = Rational::from((k, 3));
            assert!(k % 3 != 0);
            x.lambda_fiber(&s).unwrap().curve().j_invariant().unwrap()
        })
        .map(|j| BigComplex::from_rational(&j, PREC))
        .collect();
    for i in 0..js.len() {
        for k in 0..i {
            assert!(js[i].dist(&js[k]).to_f64() > 1e-6);
        }
    }
}

#[test]
fn pencils_are_distinct() {
    let x = fermat_double_fibration();
    let u = BigComplex::from_f64(0.7, 0.2, PREC);
    let lams: Vec<BigComplex> = [0.1, 0.5, 1.3]
        .iter()
        .map(|&t| {
            let p = x.sample_point(Generator::Tau, &u, &BigComplex::from_f64(t, 0.4, PREC)).unwrap();
            x.lambda(&p).unwrap()
        })
        .collect();
    assert!(lams[0].dist(&lams[1]).to_f64() > 1e-6);
    assert!(lams[1].dist(&lams[2]).to_f64() > 1e-6);
}

#[test]
fn rational_fibers_match_the_symbolic_family() {
    let x = fermat_double_fibration();
    let (fam, _) = x.symbolic_family(Generator::Sigma).unwrap();
    for k in [2i64, 3, -5] {
        let s = Rational::from(k);
        let j_fib = x.lambda_fiber(&s).unwrap().curve().j_invariant().unwrap();
        let j_fam = fam.fiber(&s).unwrap().j_invariant().unwrap();
        assert_eq!(j_fib, j_fam);
    }
}

#[test]
fn doubly_torsion_seed_cycles() {
    let x = fermat_double_fibration();
    let seeds = x.doubly_torsion_seeds(4, 4, PREC).unwrap();
    assert!(!seeds.is_empty());
    for sd in seeds.iter().take(4) {
        let p = sd.seed.clone().unwrap();
        let mut q = p.clone();
        for _ in 0..4 {
            q = x.apply_sigma(&q).unwrap();
        }
        assert!(q.distance(&p) < 1e-20);
        let r = x.orbit(&p, ScheduleKind::AlternatingRays, 50, default_match_tol(PREC));
        match r.status {
            OrbitStatus::CycleFound { period } => assert_eq!(16 % period, 0),
            other => panic!("{:?}", other),
        }
    }
}

#[test]
fn common_points_lie_on_both_fibers() {
    let x = fermat_double_fibration();
    let s = BigComplex::from_f64(1.7, 0.3, PREC);
    let u = BigComplex::from_f64(-0.4, 0.9, PREC);
    let pts = x.common_points(&s, &u).unwrap();
    assert!(!pts.is_empty());
    for p in pts {
        assert!(x.lambda(&p).unwrap().dist(&s).to_f64() < TOL);
        assert!(x.mu(&p).unwrap().dist(&u).to_f64() < TOL);
    }
}
