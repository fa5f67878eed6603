use rug::{Integer, Rational};
use serde::Serialize;

use crate::elliptic::{CurveFamily, Section};
use crate::error::{Error, Result};
use crate::locus::{exact_order_oracle, TorsionHit};
use crate::numerics::factor::factor_rational;
use crate::numerics::{BigComplex, Poly};

use super::weil::{weil_height_algebraic, weil_height_rational, AlgebraicNumber};

/// One torsion parameter. `degree` and `height` are `None` for numeric-only rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightRow {
    pub n: u32,
    pub parameter: String,
    pub degree: Option<usize>,
    pub height: Option<f64>,
}

impl HeightRow {
    pub fn numeric_only(&self) -> bool {
        self.height.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HeightTable {
    pub rows: Vec<HeightRow>,
}

impl HeightTable {
    pub fn new(mut rows: Vec<HeightRow>) -> Self {
        rows.sort_by(|a, b| a.n.cmp(&b.n).then_with(|| a.parameter.cmp(&b.parameter)));
        HeightTable { rows }
    }

    /// Largest height over exact rows; `None` when there are none.
    pub fn max_height(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.height).reduce(f64::max)
    }

    /// Rows with `n <= bound`.
    pub fn truncated(&self, bound: u32) -> HeightTable {
        HeightTable {
            rows: self.rows.iter().filter(|r| r.n <= bound).cloned().collect(),
        }
    }
}

/// Polynomial in `t`, highest degree first, e.g. `t^3+8`.
pub fn format_poly(p: &Poly<Integer>) -> String {
    let mut s = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if *c == 0 {
            continue;
        }
        let neg = *c < 0;
        let mag = c.clone().abs();
        if neg {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if mag != 1 || k == 0 {
            s.push_str(&mag.to_string());
        }
        match k {
            0 => {}
            1 => s.push('t'),
            _ => s.push_str(&format!("t^{}", k)),
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn algebraic_row(n: u32, factor: &Poly<Integer>, root: BigComplex, prec: u32) -> Result<HeightRow> {
    let d = factor.degree().unwrap_or(0);
    if d == 1 {
        let c = factor.coeffs();
        let t = Rational::from((-c[0].clone(), c[1].clone()));
        return Ok(HeightRow {
            n,
            parameter: t.to_string(),
            degree: Some(1),
            height: Some(weil_height_rational(&t)),
        });
    }
    let alpha = AlgebraicNumber::new(&factor.to_rational(), root)?;
    Ok(HeightRow {
        n,
        parameter: format!("root of {}", format_poly(factor)),
        degree: Some(d),
        height: Some(weil_height_algebraic(&alpha, prec)?),
    })
}

/// Heights of the parameters of scanner hits.
pub fn silverman_table(_family: &CurveFamily, _s: &Section, hits: &[TorsionHit], prec: u32) -> Result<HeightTable> {
    let mut rows = Vec::with_capacity(hits.len());
    for h in hits {
        let c = &h.certificate;
        let row = match (&c.exact_t0, &c.factor) {
            (Some(t), _) if c.certified => HeightRow {
                n: h.order,
                parameter: t.to_string(),
                degree: Some(1),
                height: Some(weil_height_rational(t)),
            },
            (None, Some(f)) if c.certified => algebraic_row(h.order, f, h.t0.clone(), prec)?,
            _ => HeightRow {
                n: h.order,
                parameter: format!("~{:.12}{:+.12}i", h.t0.re_f64(), h.t0.im_f64()),
                degree: None,
                height: None,
            },
        };
        rows.push(row);
    }
    Ok(HeightTable::new(rows))
}

/// One row per irreducible factor of each exact-order oracle with `2 <= n <= max_n`.
pub fn exact_parameter_table(family: &CurveFamily, s: &Section, max_n: u32, prec: u32) -> Result<HeightTable> {
    let mut rows = vec![];
    for n in 2..=max_n {
        let q = exact_order_oracle(family, s, n)?;
        if q.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (f, _) in factor_rational(&q)? {
            let root = BigComplex::zero(prec);
            rows.push(algebraic_row(n, &f, root, prec)?);
        }
    }
    Ok(HeightTable::new(rows))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MasserFit {
    pub c: f64,
    pub row: HeightRow,
}

/// Smallest `c` with `n <= c d^2 (1 + h)` over the exact rows.
pub fn masser_fit(table: &HeightTable) -> Result<MasserFit> {
    let mut best: Option<MasserFit> = None;
    for r in &table.rows {
        if let (Some(d), Some(h)) = (r.degree, r.height) {
            let c = r.n as f64 / ((d * d) as f64 * (1.0 + h));
            if best.as_ref().map_or(true, |b| c > b.c) {
                best = Some(MasserFit { c, row: r.clone() });
            }
        }
    }
    best.ok_or_else(|| Error::domain("masser fit needs at least one exact row"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: u32, d: usize, h: f64) -> HeightRow {
        HeightRow { n, parameter: String::new(), degree: Some(d), height: Some(h) }
    }

    #[test]
    fn fit_examples() {
        let c = masser_fit(&HeightTable::new(vec![row(4, 1, 2f64.ln())])).unwrap().c;
        assert!((c - 4.0 / (1.0 + 2f64.ln())).abs() < 1e-12);
        assert!((c - 2.3627).abs() < 1e-3);
        let t = HeightTable::new(vec![row(4, 1, 2f64.ln()), row(3, 1, 0.0)]);
        assert_eq!(masser_fit(&t).unwrap().c, 3.0);
        assert!(masser_fit(&HeightTable::default()).is_err());
        assert_eq!(HeightTable::default().max_height(), None);
    }

    #[test]
    fn demo_small_orders() {
        let t = exact_parameter_table(&CurveFamily::demo(), &Section::demo(), 4, 128).unwrap();
        let got: Vec<_> = t.rows.iter().map(|r| (r.n, r.parameter.clone(), r.height.unwrap())).collect();
        assert_eq!(got.len(), 3);
        assert_eq!((got[0].0, got[0].1.as_str(), got[0].2), (3, "0", 0.0));
        assert_eq!((got[1].0, got[1].1.as_str()), (4, "-2"));
        assert!((got[1].2 - 2f64.ln()).abs() < 1e-15);
        assert_eq!(got[2].1, "root of t^2-2t+4");
        assert!((got[2].2 - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn poly_format() {
        assert_eq!(format_poly(&Poly::from_i64s(&[8, 0, 0, 1]).primitive_integer()), "t^3+8");
        assert_eq!(format_poly(&Poly::from_i64s(&[-3, 0, -2]).primitive_integer()), "2t^2+3");
    }
}
