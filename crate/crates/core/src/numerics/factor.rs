//! Factorization of polynomials over the integers (Zassenhaus: modular
//! factorization, Hensel lifting, recombination of modular factors).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

use super::poly::{primitive_part, Poly};

/// Irreducible factors with multiplicity, each primitive with positive
/// leading coefficient, sorted by degree then coefficients. The rational
/// constant factor is dropped.
pub fn factor_rational(f: &Poly<Rational>) -> Result<Vec<(Poly<Integer>, u32)>> {
    if f.is_zero_poly() {
        return Err(Error::domain("cannot factor the zero polynomial"));
    }
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(f) {
        let zp = part.primitive_integer();
        for g in factor_squarefree(&zp)? {
            out.push((g, mult));
        }
    }
    out.sort_by(|a, b| cmp_poly(&a.0, &b.0).then(a.1.cmp(&b.1)));
    Ok(out)
}

pub fn factor_integer(f: &Poly<Integer>) -> Result<Vec<(Poly<Integer>, u32)>> {
    factor_rational(&f.to_rational())
}

pub fn is_irreducible(f: &Poly<Rational>) -> Result<bool> {
    if f.degree().unwrap_or(0) == 0 {
        return Ok(false);
    }
    let fs = factor_rational(f)?;
    Ok(fs.len() == 1 && fs[0].1 == 1)
}

fn cmp_poly(a: &Poly<Integer>, b: &Poly<Integer>) -> std::cmp::Ordering {
    a.degree()
        .cmp(&b.degree())
        .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
}

/// Yun's algorithm over Q; returns monic squarefree parts with multiplicity.
pub fn squarefree_decomposition(f: &Poly<Rational>) -> Vec<(Poly<Rational>, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = f.monic();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_rem(&a0).0;
    let mut c = df.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    loop {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_rem(&a).0;
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Factor a squarefree primitive integer polynomial.
fn factor_squarefree(f: &Poly<Integer>) -> Result<Vec<Poly<Integer>>> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut f = f.clone();
    if f.valuation() > 0 {
        out.push(Poly::new(vec![Integer::from(0), Integer::from(1)]));
        f = Poly::new(f.coeffs()[1..].to_vec());
    }
    match f.degree() {
        Some(0) | None => {}
        Some(1) => out.push(primitive_part(&f)),
        Some(_) => out.extend(zassenhaus(&primitive_part(&f))?),
    }
    Ok(out)
}

fn zassenhaus(f: &Poly<Integer>) -> Result<Vec<Poly<Integer>>> {
    let n = f.degree().unwrap();
    let lc = f.leading().unwrap().clone();

    // Pick the prime with the fewest modular factors among a few candidates.
    let mut best: Option<(u64, Vec<Vec<u64>>)> = None;
    let mut tried = 0;
    let mut p = 3u64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    while tried < 6 {
        p = next_prime(p + 2);
        if p > 1 << 20 {
            break;
        }
        if lc.mod_u(p as u32) == 0 {
            continue;
        }
        let fp = fp_from_int(f, p);
        if fp_degree(&fp) != Some(n) {
            continue;
        }
        let g = fp_gcd(&fp, &fp_deriv(&fp, p), p);
        if fp_degree(&g) != Some(0) {
            continue;
        }
        tried += 1;
        let facs = fp_factor_squarefree(&fp_monic(&fp, p), p, &mut rng);
        if facs.len() == 1 {
            return Ok(vec![f.clone()]);
        }
        if best.as_ref().map_or(true, |b| facs.len() < b.1.len()) {
            best = Some((p, facs));
        }
    }
    let (p, facs) = best.ok_or_else(|| Error::numeric("no suitable prime for factorization"))?;

    // Coefficient bound for factors scaled by lc.
    let mut norm1 = Integer::new();
    for c in f.coeffs() {
        norm1 += c.clone().abs();
    }
    let bound = Integer::from(lc.clone().abs() * norm1) << (n as u32 + 1);
    let mut modulus = Integer::from(p);
    while modulus <= bound {
        modulus = Integer::from(&modulus * &modulus);
    }
    let lifted = hensel_lift(f, &facs, p, &modulus);
    recombine(f, lifted, &modulus)
}

fn next_prime(mut n: u64) -> u64 {
    loop {
        if Integer::from(n).is_probably_prime(30) != rug::integer::IsPrime::No {
            return n;
        }
        n += 1;
    }
}

// ---------- arithmetic in F_p[x], coefficients low first ----------

type Fp = Vec<u64>;

fn fp_trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_degree(a: &Fp) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

fn fp_from_int(f: &Poly<Integer>, p: u64) -> Fp {
    let pi = Integer::from(p);
    fp_trim(
        f.coeffs()
            .iter()
            .map(|c| mod_pos(c, &pi).to_u64().unwrap())
            .collect(),
    )
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_trim(r)
}

fn fp_scale(a: &Fp, c: u64, p: u64) -> Fp {
    fp_trim(a.iter().map(|&x| mulmod(x, c, p)).collect())
}

fn fp_monic(a: &Fp, p: u64) -> Fp {
    match a.last() {
        None => vec![],
        Some(&l) => fp_scale(a, invmod(l, p), p),
    }
}

fn fp_divrem(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let db = fp_degree(b).expect("division by zero");
    if a.len() <= db {
        return (vec![], a.clone());
    }
    let inv = invmod(b[db], p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = mulmod(r[k + db], inv, p);
        if c != 0 {
            for (j, &y) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mulmod(c, y, p)) % p;
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    (fp_trim(q), fp_trim(r))
}

fn fp_rem(a: &Fp, b: &Fp, p: u64) -> Fp {
    fp_divrem(a, b, p).1
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

/// Returns `(g, s, t)` with `s a + t b = g` monic.
fn fp_xgcd(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp, Fp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let inv = invmod(*r0.last().unwrap(), p);
    (fp_scale(&r0, inv, p), fp_scale(&s0, inv, p), fp_scale(&t0, inv, p))
}

fn fp_deriv(a: &Fp, p: u64) -> Fp {
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulmod(c, i as u64 % p, p))
            .collect(),
    )
}

fn fp_powmod(base: &Fp, e: &Integer, m: &Fp, p: u64) -> Fp {
    let mut result = vec![1u64];
    let b = fp_rem(base, m, p);
    for i in (0..e.significant_bits()).rev() {
        result = fp_rem(&fp_mul(&result, &result, p), m, p);
        if e.get_bit(i) {
            result = fp_rem(&fp_mul(&result, &b, p), m, p);
        }
    }
    result
}

/// Distinct-degree then equal-degree (Cantor–Zassenhaus) factorization of a
/// monic squarefree polynomial over F_p, p odd.
fn fp_factor_squarefree(f: &Fp, p: u64, rng: &mut ChaCha8Rng) -> Vec<Fp> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let pi = Integer::from(p);
    let mut i = 1;
    while fp_degree(&rest).unwrap_or(0) >= 2 * i {
        h = fp_powmod(&h, &pi, &rest, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &rest, p);
        if fp_degree(&g).unwrap_or(0) > 0 {
            equal_degree(&g, i, p, rng, &mut out);
            rest = fp_divrem(&rest, &g, p).0;
            h = fp_rem(&h, &rest, p);
        }
        i += 1;
    }
    if fp_degree(&rest).unwrap_or(0) > 0 {
        out.push(fp_monic(&rest, p));
    }
    out
}

fn equal_degree(g: &Fp, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Fp>) {
    let n = fp_degree(g).unwrap();
    if n == d {
        out.push(fp_monic(g, p));
        return;
    }
    let e = (Integer::from(Integer::u_pow_u(p as u32, d as u32)) - 1u32) / 2u32;
    loop {
        let a: Fp = fp_trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if fp_degree(&a).unwrap_or(0) == 0 {
            continue;
        }
        let b = fp_sub(&fp_powmod(&a, &e, g, p), &vec![1u64], p);
        let c = fp_gcd(&b, g, p);
        let dc = fp_degree(&c).unwrap_or(0);
        if dc > 0 && dc < n {
            equal_degree(&c, d, p, rng, out);
            equal_degree(&fp_divrem(g, &c, p).0, d, p, rng, out);
            return;
        }
    }
}

// ---------- arithmetic in (Z/m)[x] ----------

type Zm = Vec<Integer>;

fn mod_pos(c: &Integer, m: &Integer) -> Integer {
    let mut r = Integer::from(c % m);
    if r < 0 {
        r += m;
    }
    r
}

fn zm_reduce(a: &[Integer], m: &Integer) -> Zm {
    let mut v: Zm = a.iter().map(|c| mod_pos(c, m)).collect();
    while v.last().map_or(false, |c| *c == 0) {
        v.pop();
    }
    v
}

fn zm_add(a: &Zm, b: &Zm, m: &Integer) -> Zm {
    let n = a.len().max(b.len());
    let zero = Integer::new();
    let v: Zm = (0..n)
        .map(|i| Integer::from(a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero)))
        .collect();
    zm_reduce(&v, m)
}

fn zm_sub(a: &Zm, b: &Zm, m: &Integer) -> Zm {
    let n = a.len().max(b.len());
    let zero = Integer::new();
    let v: Zm = (0..n)
        .map(|i| Integer::from(a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)))
        .collect();
    zm_reduce(&v, m)
}

fn zm_mul(a: &Zm, b: &Zm, m: &Integer) -> Zm {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += Integer::from(x * y);
        }
    }
    zm_reduce(&r, m)
}

/// Division by a monic polynomial.
fn zm_divrem_monic(a: &Zm, b: &Zm, m: &Integer) -> (Zm, Zm) {
    let db = b.len() - 1;
    if a.len() <= db {
        return (vec![], a.clone());
    }
    let mut r = a.clone();
    let mut q = vec![Integer::new(); a.len() - db];
    for k in (0..q.len()).rev() {
        let c = mod_pos(&r[k + db], m);
        if c != 0 {
            for (j, y) in b.iter().enumerate() {
                r[k + j] -= Integer::from(&c * y);
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    (zm_reduce(&q, m), zm_reduce(&r, m))
}

fn zm_from_fp(a: &Fp) -> Zm {
    a.iter().map(|&c| Integer::from(c)).collect()
}

fn zm_monic(a: &Zm, m: &Integer) -> Zm {
    let inv = a.last().unwrap().clone().invert(m).expect("leading coefficient not a unit");
    zm_reduce(&a.iter().map(|c| Integer::from(c * &inv)).collect::<Vec<_>>(), m)
}

/// Lift `f = lc * prod(facs) mod p` to the given modulus (a power of p).
fn hensel_lift(f: &Poly<Integer>, facs: &[Fp], p: u64, target: &Integer) -> Vec<Zm> {
    let mut out = Vec::new();
    let mut cur: Zm = f.coeffs().to_vec();
    for idx in 0..facs.len() {
        if idx + 1 == facs.len() {
            out.push(zm_monic(&zm_reduce(&cur, target), target));
            break;
        }
        let lc = cur.last().unwrap().clone();
        let pm = Integer::from(p);
        let mut g = zm_reduce(
            &zm_from_fp(&facs[idx]).iter().map(|c| Integer::from(c * &lc)).collect::<Vec<_>>(),
            &pm,
        );
        let mut hfp = vec![1u64];
        for h in &facs[idx + 1..] {
            hfp = fp_mul(&hfp, h, p);
        }
        let mut h = zm_from_fp(&hfp);
        let gfp: Fp = g.iter().map(|c| c.to_u64().unwrap()).collect();
        let (_, s, t) = fp_xgcd(&gfp, &hfp, p);
        let mut s = zm_from_fp(&s);
        let mut t = zm_from_fp(&t);
        let mut m = pm;
        while m < *target {
            let m2 = Integer::from(&m * &m);
            let e = zm_sub(&zm_reduce(&cur, &m2), &zm_mul(&g, &h, &m2), &m2);
            let (q, r) = zm_divrem_monic(&zm_mul(&s, &e, &m2), &h, &m2);
            let g2 = zm_add(&zm_add(&g, &zm_mul(&t, &e, &m2), &m2), &zm_mul(&q, &g, &m2), &m2);
            let h2 = zm_add(&h, &r, &m2);
            let one = vec![Integer::from(1)];
            let b = zm_sub(
                &zm_add(&zm_mul(&s, &g2, &m2), &zm_mul(&t, &h2, &m2), &m2),
                &one,
                &m2,
            );
            let (c, d) = zm_divrem_monic(&zm_mul(&s, &b, &m2), &h2, &m2);
            s = zm_sub(&s, &d, &m2);
            t = zm_sub(&zm_sub(&t, &zm_mul(&t, &b, &m2), &m2), &zm_mul(&c, &g2, &m2), &m2);
            g = g2;
            h = h2;
            m = m2;
        }
        out.push(zm_monic(&zm_reduce(&g, target), target));
        cur = h;
    }
    out
}

fn symmetric(a: &Zm, m: &Integer) -> Poly<Integer> {
    let half = Integer::from(m >> 1);
    Poly::new(
        a.iter()
            .map(|c| {
                let c = mod_pos(c, m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn exact_quotient(f: &Poly<Integer>, g: &Poly<Integer>) -> Option<Poly<Integer>> {
    let f0 = &f.coeffs()[0];
    let g0 = &g.coeffs()[0];
    if *g0 != 0 && *f0 != 0 && !f0.is_divisible(g0) {
        return None;
    }
    let (q, r) = f.to_rational().div_rem(&g.to_rational());
    if !r.is_zero_poly() {
        return None;
    }
    if q.coeffs().iter().any(|c| *c.denom() != 1) {
        return None;
    }
    Some(Poly::new(q.coeffs().iter().map(|c| c.numer().clone()).collect()))
}

const MAX_SUBSETS: u64 = 1 << 22;

fn recombine(f: &Poly<Integer>, mut facs: Vec<Zm>, m: &Integer) -> Result<Vec<Poly<Integer>>> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let mut size = 1;
    let mut budget = MAX_SUBSETS;
    'outer: while 2 * size <= facs.len() {
        let lc = f.leading().unwrap().clone();
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if budget == 0 {
                return Err(Error::Resource("factor recombination subset budget".into()));
            }
            budget -= 1;
            let mut g: Zm = vec![lc.clone()];
            for &i in &idx {
                g = zm_mul(&g, &facs[i], m);
            }
            let cand = primitive_part(&symmetric(&g, m));
            if let Some(q) = exact_quotient(&f, &cand) {
                out.push(cand);
                f = q;
                for &i in idx.iter().rev() {
                    facs.remove(i);
                }
                continue 'outer;
            }
            // next combination
            let k = idx.len();
            let mut j = k;
            while j > 0 && idx[j - 1] == facs.len() - k + j - 1 {
                j -= 1;
            }
            if j == 0 {
                break;
            }
            idx[j - 1] += 1;
            for l in j..k {
                idx[l] = idx[l - 1] + 1;
            }
        }
        size += 1;
    }
    if f.degree().unwrap_or(0) > 0 {
        out.push(primitive_part(&f));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(cs: &[i64]) -> Poly<Integer> {
        Poly::new(cs.iter().map(|&c| Integer::from(c)).collect())
    }

    fn expand(fs: &[(Poly<Integer>, u32)]) -> Poly<Integer> {
        let mut acc = zp(&[1]);
        for (g, e) in fs {
            for _ in 0..*e {
                acc = acc.mul(g);
            }
        }
        acc
    }

    #[test]
    fn x4_minus_1() {
        let fs = factor_integer(&zp(&[-1, 0, 0, 0, 1])).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[2].0, zp(&[1, 0, 1]));
        assert_eq!(expand(&fs), zp(&[-1, 0, 0, 0, 1]));
    }

    #[test]
    fn swinnerton_dyer_like_irreducible() {
        // x^4 - 10x^2 + 1 splits into quadratics mod every prime.
        let f = zp(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f.to_rational()).unwrap());
    }

    #[test]
    fn repeated_and_nonmonic() {
        let a = zp(&[3, -2]); // 3 - 2x
        let b = zp(&[1, 1, 5]);
        let c = zp(&[0, 1]);
        let f = a.mul(&a).mul(&b).mul(&c).mul(&zp(&[6]));
        let fs = factor_integer(&f).unwrap();
        let degs: Vec<_> = fs.iter().map(|(g, e)| (g.degree().unwrap(), *e)).collect();
        assert_eq!(degs, vec![(1, 1), (1, 2), (2, 1)]);
        // primitive with positive leading coefficient
        assert_eq!(fs[1].0, zp(&[-3, 2]));
    }

    #[test]
    fn product_of_many_linear_factors() {
        let mut f = zp(&[1]);
        for k in 1..=9 {
            f = f.mul(&zp(&[-k, 2]));
        }
        let fs = factor_integer(&f).unwrap();
        assert_eq!(fs.len(), 9);
        assert!(fs.iter().all(|(g, e)| g.degree() == Some(1) && *e == 1));
    }
}
