use std::path::PathBuf;

use rug::{Integer, Rational};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, Ring};

/// Levels with shipped tables.
pub const SUPPORTED_LEVELS: [u32; 5] = [2, 3, 5, 7, 13];

const EMBEDDED: [(u32, &str); 5] = [
    (2, include_str!("../../../../data/modpoly/phi_2.txt")),
    (3, include_str!("../../../../data/modpoly/phi_3.txt")),
    (5, include_str!("../../../../data/modpoly/phi_5.txt")),
    (7, include_str!("../../../../data/modpoly/phi_7.txt")),
    (13, include_str!("../../../../data/modpoly/phi_13.txt")),
];

/// Environment variable naming a directory of `phi_<N>.txt` tables that
/// replaces the embedded copies.
pub const DATA_ENV: &str = "FIBRETORSION_DATA";

/// Classical modular polynomial; `coeffs[i][j]` multiplies `X^i Y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularPoly {
    pub level: u32,
    coeffs: Vec<Vec<Integer>>,
}

/// Body with a trailing `sha256 <hex>` line over everything before it.
pub(crate) fn with_checksum(body: &str) -> String {
    format!("{}sha256 {}\n", body, hex::encode(Sha256::digest(body.as_bytes())))
}

/// Splits off and checks the checksum line; returns the body.
pub(crate) fn verify_checksum(text: &str) -> Result<&str> {
    let trimmed = text.trim_end_matches('\n');
    let cut = trimmed.rfind('\n').map_or(0, |i| i + 1);
    let (body, last) = trimmed.split_at(cut);
    let digest = last
        .strip_prefix("sha256 ")
        .ok_or_else(|| Error::DataIntegrity("missing checksum line".into()))?;
    let actual = hex::encode(Sha256::digest(body.as_bytes()));
    if actual != digest.trim() {
        return Err(Error::DataIntegrity(format!("checksum mismatch: expected {}, got {}", digest.trim(), actual)));
    }
    Ok(body)
}

impl ModularPoly {
    /// Parses and validates a table in the `PHI N <N>` / `i j c` / `sha256` format.
    pub fn parse(text: &str) -> Result<Self> {
        let body = verify_checksum(text)?;
        let mut lines = body.lines();
        let header = lines.next().unwrap_or("");
        let level: u32 = header
            .strip_prefix("PHI N ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::DataIntegrity(format!("bad header {:?}", header)))?;
        let d = level as usize + 1;
        let mut coeffs = vec![vec![Integer::new(); d + 1]; d + 1];
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::DataIntegrity(format!("bad row {:?}", line));
            if f.len() != 3 {
                return Err(bad());
            }
            let i: usize = f[0].parse().map_err(|_| bad())?;
            let j: usize = f[1].parse().map_err(|_| bad())?;
            let c: Integer = f[2].parse().map_err(|_| bad())?;
            if i > d || j > d {
                return Err(Error::DataIntegrity(format!("degree exceeds {} in row {:?}", d, line)));
            }
            coeffs[i][j] = c;
        }
        let p = ModularPoly { level, coeffs };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let d = self.degree();
        for i in 0..=d {
            for j in 0..i {
                if self.coeffs[i][j] != self.coeffs[j][i] {
                    return Err(Error::DataIntegrity(format!("PHI_{} is not symmetric at ({}, {})", self.level, i, j)));
                }
            }
        }
        // X^(N+1) is the only term of top X-degree.
        let top = (0..=d).all(|j| self.coeffs[d][j] == if j == 0 { 1 } else { 0 });
        if is_prime(self.level) && !top {
            return Err(Error::DataIntegrity(format!("PHI_{} must be monic of degree {}", self.level, d)));
        }
        Ok(())
    }

    /// Degree in each variable.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize, j: usize) -> &Integer {
        &self.coeffs[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.degree();
        (0..=d).all(|i| (0..=d).all(|j| self.coeffs[i][j] == self.coeffs[j][i]))
    }

    pub fn eval_rational(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::new();
        for i in (0..=self.degree()).rev() {
            let mut row = Rational::new();
            for j in (0..=self.degree()).rev() {
                row = row * y + &self.coeffs[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }

    pub fn eval_complex(&self, x: &BigComplex, y: &BigComplex) -> BigComplex {
        let prec = x.prec().min(y.prec());
        let mut acc = BigComplex::zero(prec);
        for i in (0..=self.degree()).rev() {
            let mut row = BigComplex::zero(prec);
            for j in (0..=self.degree()).rev() {
                row = &(&row * y) + &BigComplex::from_rational(&Rational::from(&self.coeffs[i][j]), prec);
            }
            acc = &(&acc * x) + &row;
        }
        acc
    }

    /// `log2 sum |c_ij| |x|^i |y|^j`, the rounding scale of an evaluation.
    pub fn scale_log2(&self, x: &BigComplex, y: &BigComplex) -> f64 {
        let lg = |z: &BigComplex| if z.is_zero() { f64::NEG_INFINITY } else { z.log2_abs_approx() };
        let (lx, ly) = (lg(x), lg(y));
        let mut terms = vec![];
        for i in 0..=self.degree() {
            for j in 0..=self.degree() {
                let c = &self.coeffs[i][j];
                if *c == 0 {
                    continue;
                }
                let (m, e) = c.to_f64_exp();
                let mut t = e as f64 + m.abs().log2();
                if i > 0 {
                    t += i as f64 * lx;
                }
                if j > 0 {
                    t += j as f64 * ly;
                }
                terms.push(t);
            }
        }
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return top;
        }
        top + terms.iter().map(|t| (t - top).exp2()).sum::<f64>().log2()
    }

    /// Rows in the shipped text format.
    pub fn to_text(&self) -> String {
        let mut body = format!("PHI N {}\n", self.level);
        for i in 0..=self.degree() {
            for j in 0..=self.degree() {
                if self.coeffs[i][j] != 0 {
                    body.push_str(&format!("{} {} {}\n", i, j, self.coeffs[i][j]));
                }
            }
        }
        with_checksum(&body)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Raw text of the level-`n` table, from `$FIBRETORSION_DATA/phi_<n>.txt`
/// when the variable is set, otherwise the embedded copy.
pub fn table_text(n: u32) -> Result<String> {
    match std::env::var_os(DATA_ENV) {
        Some(dir) => {
            let path = PathBuf::from(dir).join(format!("phi_{}.txt", n));
            std::fs::read_to_string(&path)
                .map_err(|e| Error::DataIntegrity(format!("cannot read {}: {}", path.display(), e)))
        }
        None => EMBEDDED
            .iter()
            .find(|(k, _)| *k == n)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| Error::domain(format!("no modular polynomial of level {}", n))),
    }
}

/// The validated table for level `n`.
pub fn modular_poly(n: u32) -> Result<ModularPoly> {
    let p = ModularPoly::parse(&table_text(n)?)?;
    if p.level != n {
        return Err(Error::DataIntegrity(format!("file for level {} holds level {}", n, p.level)));
    }
    Ok(p)
}

/// `|v| < 2^(-prec/4) * 2^scale_log2`.
fn vanishes(v: &BigComplex, scale_log2: f64, prec: u32) -> bool {
    v.is_zero() || v.log2_abs_approx() < -(prec as f64) / 4.0 + scale_log2.max(0.0)
}

/// Smallest level `N <= nmax` (1 meaning `j1 = j2`) with `Phi_N(j1, j2)`
/// numerically zero.
pub fn is_isogenous(j1: &BigComplex, j2: &BigComplex, nmax: u32) -> Result<Option<u32>> {
    let prec = j1.prec().min(j2.prec());
    let diff = j1 - j2;
    if vanishes(&diff, (1.0 + j1.abs_f64().max(j2.abs_f64())).log2(), prec) {
        return Ok(Some(1));
    }
    for n in SUPPORTED_LEVELS.iter().copied().filter(|&n| n <= nmax) {
        let phi = modular_poly(n)?;
        let v = phi.eval_complex(j1, j2);
        if vanishes(&v, phi.scale_log2(j1, j2), prec) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Relative size `log2(|Phi_N(j1, j2)| / scale)`, for reports.
pub fn relative_residual(phi: &ModularPoly, j1: &BigComplex, j2: &BigComplex) -> f64 {
    let v = phi.eval_complex(j1, j2);
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    v.log2_abs_approx() - phi.scale_log2(j1, j2).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi2_known_values() {
        let p = modular_poly(2).unwrap();
        assert_eq!(p.degree(), 3);
        assert!(p.is_symmetric());
        assert_eq!(*p.coeff(1, 1), 40773375);
        assert_eq!(p.eval_rational(&Rational::from(0), &Rational::from(54000)), 0);
        assert_eq!(p.eval_rational(&Rational::from(1728), &Rational::from(287496)), 0);
        assert_ne!(p.eval_rational(&Rational::from(1), &Rational::from(2)), 0);
    }

    #[test]
    fn all_levels_load() {
        for n in SUPPORTED_LEVELS {
            let p = modular_poly(n).unwrap();
            assert_eq!(p.degree(), n as usize + 1);
            assert_eq!(ModularPoly::parse(&p.to_text()).unwrap(), p);
        }
        assert!(modular_poly(4).is_err());
    }

    #[test]
    fn tampered_table_is_rejected() {
        let text = modular_poly(2).unwrap().to_text().replace("40773375", "40773376");
        assert!(matches!(ModularPoly::parse(&text), Err(Error::DataIntegrity(_))));
        let body = "PHI N 2\n0 1 5\n3 0 1\n0 3 1\n";
        assert!(matches!(ModularPoly::parse(&with_checksum(body)), Err(Error::DataIntegrity(_))));
    }

    #[test]
    fn isogeny_levels() {
        let c = |x: f64| BigComplex::from_f64(x, 0.0, 128);
        assert_eq!(is_isogenous(&c(1234.5), &c(1234.5), 13).unwrap(), Some(1));
        assert_eq!(is_isogenous(&c(0.0), &c(54000.0), 2).unwrap(), Some(2));
        assert_eq!(is_isogenous(&c(0.0), &c(54000.0), 13).unwrap(), Some(2));
        let a = BigComplex::from_f64(123.456, 7.89, 128);
        let b = BigComplex::from_f64(-3456.7, 12.3, 128);
        assert_eq!(is_isogenous(&a, &b, 13).unwrap(), None);
    }
}
