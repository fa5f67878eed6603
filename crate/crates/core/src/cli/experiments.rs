use serde_json::{json, Value};

use crate::elliptic::CurveFamily;
use crate::error::{Error, Result};
use crate::fibration::{default_match_tol, fermat_double_fibration, refine_to_surface, SurfacePoint};
use crate::heights::{exact_parameter_table, format_poly, masser_fit};
use crate::isogeny::{
    dependence_search, is_isogenous, legendre_isogeny_locus, legendre_j, locus_points, CoverSection, DependenceQuery,
};
use crate::locus::{count_rational, exceptional_scan, scan_torsion, ScanOptions};
use crate::numerics::complex::float_to_decimal;
use crate::numerics::BigComplex;
use crate::periods::{betti_coords, elliptic_log, monodromy, period_lattice, ParamPath};

use super::config::*;
use super::output::{csv_table, Report};

fn pair(z: &BigComplex) -> [String; 2] {
    let (r, i) = z.to_decimal_pair();
    [r, i]
}

fn num(x: f64) -> String {
    format!("{}", x)
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let prec = cfg.precision_bits;
    match &cfg.experiment {
        Experiment::ScanTorsion(p) => scan(p, prec),
        Experiment::CountRational(p) => count(p, prec),
        Experiment::Periods(p) => periods(p, prec),
        Experiment::Betti(p) => betti(p, prec),
        Experiment::Heights(p) => heights(p, prec),
        Experiment::Monodromy(p) => monodromy_loops(p, prec),
        Experiment::Orbit(p) => orbit(p, prec),
        Experiment::Isogeny(p) => isogeny(p, prec),
        Experiment::ExceptionalScan(p) => exceptional(p, prec),
    }
}

fn scan(p: &ScanParams, prec: u32) -> Result<Report> {
    let (fam, sec) = p.family.build()?;
    let w = p.window.build()?;
    let opts = ScanOptions { precision: prec, ..Default::default() };
    let rep = scan_torsion(&fam, &sec, &w, &opts)?;
    let mut rows = vec![];
    let mut hits = vec![];
    for h in &rep.hits {
        let c = &h.certificate;
        let [re, im] = match &c.exact_t0 {
            Some(q) => [q.to_string(), "0".to_string()],
            None => pair(&h.t0),
        };
        let (b1, b2) = (float_to_decimal(&h.betti.beta1), float_to_decimal(&h.betti.beta2));
        rows.push(vec![
            h.order.to_string(),
            re.clone(),
            im.clone(),
            b1.clone(),
            b2.clone(),
            (c.certified as u8).to_string(),
        ]);
        hits.push(json!({
            "order": h.order,
            "t0": [re, im],
            "t0_numeric": pair(&h.t0),
            "betti": [b1, b2],
            "betti_numerators": [h.betti_numerators.0, h.betti_numerators.1],
            "certified": c.certified,
            "exact_t0": c.exact_t0.as_ref().map(|q| q.to_string()),
            "factor": c.factor.as_ref().map(format_poly),
            "residual": c.residual,
        }));
    }
    let warnings: Vec<Value> = rep
        .warnings
        .iter()
        .map(|w| json!({"order": w.order, "missed": w.missed.iter().map(pair).collect::<Vec<_>>()}))
        .collect();
    let csv = csv_table(&["order", "re_t0", "im_t0", "beta1", "beta2", "certified"], rows)?;
    let summary = json!({"hits": rep.hits.len(), "completeness_warnings": warnings.len()});
    let mirror = json!({"hits": hits, "warnings": warnings});
    Ok(Report::new("scan-torsion", csv, mirror, summary))
}

fn count(p: &CountParams, prec: u32) -> Result<Report> {
    let (fam, sec) = p.family.build()?;
    let w = p.window.build()?;
    let opts = ScanOptions { precision: prec, ..Default::default() };
    let rep = count_rational(&fam, &sec, &w, p.bound, &opts)?;
    let rows = rep.series.iter().map(|(t, c)| vec![t.to_string(), c.to_string()]).collect();
    let monotone = rep.series.windows(2).all(|w| w[0].1 <= w[1].1);
    let csv = csv_table(&["T", "count"], rows)?;
    let mirror = json!({"bound": rep.bound, "count": rep.count, "series": rep.series});
    let summary = json!({"count": rep.count, "monotone": monotone});
    Ok(Report::new("count-rational", csv, mirror, summary))
}

fn parameters(p: &PointParams, prec: u32) -> Result<Vec<BigComplex>> {
    p.parameters.iter().map(|s| parse_complex(s, prec)).collect()
}

fn periods(p: &PointParams, prec: u32) -> Result<Report> {
    let (fam, sec) = p.family.build()?;
    let mut rows = vec![];
    for (k, t) in parameters(p, prec)?.iter().enumerate() {
        let e = fam.fiber_complex(t)?;
        let basis = period_lattice(&e, prec)?;
        let l = elliptic_log(&e, &sec.point_at_complex(t), &basis)?;
        let mut row = vec![k.to_string()];
        for z in [t, &basis.omega1, &basis.omega2, &basis.tau(), &l.value] {
            row.extend(pair(z));
        }
        rows.push(row);
    }
    let header = [
        "index", "re_t", "im_t", "re_omega1", "im_omega1", "re_omega2", "im_omega2", "re_tau", "im_tau", "re_log",
        "im_log",
    ];
    let n = rows.len();
    let mirror = json!({"rows": rows});
    Ok(Report::new("periods", csv_table(&header, rows)?, mirror, json!({"parameters": n})))
}

fn betti(p: &PointParams, prec: u32) -> Result<Report> {
    let (fam, sec) = p.family.build()?;
    let mut rows = vec![];
    for (k, t) in parameters(p, prec)?.iter().enumerate() {
        let e = fam.fiber_complex(t)?;
        let basis = period_lattice(&e, prec)?;
        let b = betti_coords(&elliptic_log(&e, &sec.point_at_complex(t), &basis)?)?;
        let [re, im] = pair(t);
        rows.push(vec![k.to_string(), re, im, float_to_decimal(&b.beta1), float_to_decimal(&b.beta2)]);
    }
    let n = rows.len();
    let mirror = json!({"rows": rows});
    Ok(Report::new("betti", csv_table(&["index", "re_t", "im_t", "beta1", "beta2"], rows)?, mirror, json!({"parameters": n})))
}

fn heights(p: &HeightsParams, prec: u32) -> Result<Report> {
    let (fam, sec) = p.family.build()?;
    let table = exact_parameter_table(&fam, &sec, p.max_n, prec)?;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.parameter.clone(),
                r.degree.map_or(String::new(), |d| d.to_string()),
                r.height.map_or(String::new(), num),
            ]
        })
        .collect();
    let fit = masser_fit(&table).ok();
    let summary = json!({"rows": table.rows.len(), "masser_c": fit.as_ref().map(|f| f.c)});
    let mirror = json!({"rows": table.rows, "masser_fit": fit});
    Ok(Report::new("heights", csv_table(&["n", "t0", "degree", "height"], rows)?, mirror, summary))
}

fn monodromy_loops(p: &MonodromyParams, prec: u32) -> Result<Report> {
    let (fam, _) = p.family.build()?;
    let mut rows = vec![];
    for (k, l) in p.loops.iter().enumerate() {
        let path = ParamPath::circle(&fam, (l.center[0], l.center[1]), l.radius, l.phase, l.points, prec)?;
        let m = monodromy(&fam, &path, prec)?.0;
        let mut row = vec![k.to_string(), num(l.center[0]), num(l.center[1]), num(l.radius)];
        row.extend([m[0][0], m[0][1], m[1][0], m[1][1]].iter().map(|x| x.to_string()));
        row.push((m[0][0] + m[1][1]).to_string());
        row.push((m[0][0] * m[1][1] - m[0][1] * m[1][0]).to_string());
        rows.push(row);
    }
    let header = ["loop", "re_center", "im_center", "radius", "m11", "m12", "m21", "m22", "trace", "det"];
    let n = rows.len();
    let mirror = json!({"loops": rows});
    Ok(Report::new("monodromy", csv_table(&header, rows)?, mirror, json!({"loops": n})))
}

fn orbit(p: &OrbitParams, prec: u32) -> Result<Report> {
    let x = fermat_double_fibration();
    let mut seeds: Vec<SurfacePoint<BigComplex>> = vec![];
    for s in &p.seeds {
        let pt = match s {
            SeedSpec::Sample { generator, s, x: abscissa } => {
                x.sample_point(parse_generator(generator)?, &parse_complex(s, prec)?, &parse_complex(abscissa, prec)?)?
            }
            SeedSpec::Torsion { orders, index } => {
                let all = x.doubly_torsion_seeds(orders[0], orders[1], prec)?;
                let n = all.len();
                all.into_iter().nth(*index).and_then(|t| t.seed).ok_or_else(|| {
                    Error::Config(format!("torsion seed index {} out of range ({} seeds of orders {:?})", index, n, orders))
                })?
            }
            SeedSpec::Point { coords } => {
                let c: Vec<BigComplex> = coords.iter().map(|c| parse_complex(c, prec)).collect::<Result<_>>()?;
                let raw = SurfacePoint::new_unchecked([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]);
                refine_to_surface(&x.surface, &raw, prec)
            }
        };
        seeds.push(pt);
    }
    let tol = p.match_tol.unwrap_or_else(|| default_match_tol(prec));
    let records = x.orbits(&seeds, p.schedule, p.budget, tol);
    let mut rows = vec![];
    let mut extra = vec![];
    for (k, r) in records.iter().enumerate() {
        let status = serde_json::to_value(&r.status).map_err(|e| Error::Io(e.to_string()))?;
        let kind = status.get("kind").and_then(Value::as_str).unwrap_or("").to_string();
        let period = status.get("period").map_or(String::new(), |v| v.to_string());
        rows.push(vec![k.to_string(), kind, period, r.steps.len().to_string(), r.failures().count().to_string()]);
        extra.push((format!("orbit_{}.csv", k), r.to_csv()));
    }
    let header = ["seed", "status", "period", "steps", "failures"];
    let summary = json!({"seeds": records.len(), "statuses": rows.iter().map(|r| r[1].clone()).collect::<Vec<_>>()});
    let mirror = serde_json::to_value(&records).map_err(|e| Error::Io(e.to_string()))?;
    let mut rep = Report::new("orbit", csv_table(&header, rows)?, mirror, summary);
    rep.extra = extra;
    Ok(rep)
}

fn isogeny(p: &IsogenyParams, prec: u32) -> Result<Report> {
    let fam = CurveFamily::legendre();
    let section = CoverSection::legendre_default();
    let u = parse_rational(&p.u)?;
    let locus = legendre_isogeny_locus(p.level)?;
    let mut pts = locus_points(&locus, &u, prec)?;
    pts.sort_by(|a, b| a.0.cmp_lex(&b.0));
    let mut rows = vec![];
    let mut relations = 0;
    for (k, (t, uc)) in pts.iter().enumerate() {
        let level = is_isogenous(&legendre_j(t), &legendre_j(uc), p.level)?;
        let q = DependenceQuery { t: t.clone(), u: uc.clone(), bound: p.bound, level: p.level };
        let rel = dependence_search(&fam, &section, &q, prec)?;
        let [re, im] = pair(t);
        let mut row = vec![k.to_string(), re, im, u.to_string(), level.map_or(String::new(), |l| l.to_string())];
        match &rel {
            Some(r) => {
                relations += 1;
                row.extend([r.a.to_string(), r.b.to_string(), num(r.residual)]);
            }
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        rows.push(row);
    }
    let header = ["index", "re_t", "im_t", "u", "isogeny_level", "a", "b", "residual"];
    let summary = json!({"points": pts.len(), "relations": relations, "box": p.bound, "section": section.label});
    let mirror = json!({"level": p.level, "u": p.u, "box": p.bound, "rows": rows});
    Ok(Report::new("isogeny", csv_table(&header, rows)?, mirror, summary))
}

fn exceptional(p: &ExceptionalParams, prec: u32) -> Result<Report> {
    let x = fermat_double_fibration();
    let w = p.window.build()?;
    let hits = exceptional_scan(&x, &w, prec)?;
    let rows = hits
        .iter()
        .map(|h| {
            let mut r = vec![h.orders.0.to_string(), h.orders.1.to_string(), h.orders.2.to_string(), h.s.0.clone(), h.s.1.clone()];
            r.extend(h.point.iter().cloned());
            r
        })
        .collect();
    let header = ["order1", "order2", "order3", "re_s", "im_s", "x", "y", "z", "w"];
    let summary = json!({"hits": hits.len()});
    let mirror = json!({"hits": hits});
    Ok(Report::new("exceptional-scan", csv_table(&header, rows)?, mirror, summary))
}
