//! Analytic continuation of period bases along paths in the parameter
//! plane, and the resulting monodromy matrices.

use rug::Float;

use crate::elliptic::CurveFamily;
use crate::error::{Error, Result};
use crate::numerics::BigComplex;

use super::lattice::{period_lattice, PeriodBasis};

/// Minimal allowed distance between a waypoint and a singular parameter.
pub const SINGULAR_CLEARANCE: f64 = 1.0 / 65536.0;

const MAX_REFINEMENTS: u32 = 20;

/// Polygonal path in the parameter plane.
#[derive(Clone, Debug)]
pub struct ParamPath {
    pub waypoints: Vec<BigComplex>,
    pub max_step: f64,
}

impl ParamPath {
    /// Validates clearance from the singular parameters of `family`.
    pub fn new(family: &CurveFamily, waypoints: Vec<BigComplex>, max_step: f64) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::domain("empty path"));
        }
        if !(max_step > 0.0) {
            return Err(Error::domain("max_step must be positive"));
        }
        let prec = waypoints.iter().map(|w| w.prec()).min().unwrap();
        let sing = family.singular_parameters(prec)?;
        for (k, w) in waypoints.iter().enumerate() {
            for s in &sing {
                if w.dist(s).to_f64() < SINGULAR_CLEARANCE {
                    return Err(Error::domain(format!(
                        "waypoint {} lies within 2^-16 of singular parameter {}",
                        k, s
                    )));
                }
            }
        }
        Ok(ParamPath { waypoints, max_step })
    }

    /// Counter-clockwise circle of the given radius around `center`, starting
    /// and ending at `center + radius * e^(i phase)`.
    pub fn circle(
        family: &CurveFamily,
        center: (f64, f64),
        radius: f64,
        phase: f64,
        points: usize,
        prec: u32,
    ) -> Result<Self> {
        let mut w = Vec::with_capacity(points + 1);
        for k in 0..=points {
            let th = phase + 2.0 * std::f64::consts::PI * (k % points) as f64 / points as f64;
            w.push(BigComplex::from_f64(
                center.0 + radius * th.cos(),
                center.1 + radius * th.sin(),
                prec,
            ));
        }
        ParamPath::new(family, w, radius * 0.25)
    }

    pub fn is_closed(&self) -> bool {
        let first = &self.waypoints[0];
        let last = self.waypoints.last().unwrap();
        first.dist(last).to_f64() < 1e-30
    }

    pub fn reversed(&self) -> ParamPath {
        let mut w = self.waypoints.clone();
        w.reverse();
        ParamPath {
            waypoints: w,
            max_step: self.max_step,
        }
    }

    /// This path followed by `other` (which must start where this one ends).
    pub fn then(&self, other: &ParamPath) -> ParamPath {
        let mut w = self.waypoints.clone();
        w.extend(other.waypoints.iter().skip(1).cloned());
        ParamPath {
            waypoints: w,
            max_step: self.max_step.min(other.max_step),
        }
    }
}

/// Integer matrix of determinant one acting on column vectors of periods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonodromyMatrix(pub [[i64; 2]; 2]);

impl MonodromyMatrix {
    pub fn identity() -> Self {
        MonodromyMatrix([[1, 0], [0, 1]])
    }

    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.0, other.0);
        let mut r = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        MonodromyMatrix(r)
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        let m = self.0;
        m[0][1] == 0 && m[1][0] == 0 && m[0][0] == m[1][1] && m[0][0].abs() == 1
    }
}

/// Try to carry `basis` (at some parameter) to the lattice at `t`.
fn match_basis(basis: &PeriodBasis, target: &PeriodBasis) -> Option<PeriodBasis> {
    let quarter = Float::with_val(target.prec(), target.min_norm() / 4u32);
    let mut out = Vec::with_capacity(2);
    for w in [&basis.omega1, &basis.omega2] {
        let (_, _, v) = target.nearest_vector(w).ok()?;
        if w.dist(&v) >= quarter {
            return None;
        }
        out.push(v);
    }
    let v2 = out.pop().unwrap();
    let v1 = out.pop().unwrap();
    PeriodBasis::new(v1, v2).ok()
}

/// Analytic continuation of `start_basis` along `path`.
pub fn continue_basis(family: &CurveFamily, path: &ParamPath, start_basis: &PeriodBasis) -> Result<PeriodBasis> {
    let prec = start_basis.prec();
    let mut current = start_basis.clone();
    for seg in 0..path.waypoints.len().saturating_sub(1) {
        let a = path.waypoints[seg].with_prec(prec);
        let b = path.waypoints[seg + 1].with_prec(prec);
        let len = a.dist(&b).to_f64();
        if len == 0.0 {
            continue;
        }
        let mut steps = (len / path.max_step).ceil().max(1.0) as u64;
        let mut done = 0u64;
        let mut refinements = 0u32;
        // Progress is tracked as a fraction done/steps of the segment.
        while done < steps {
            let s = Float::with_val(prec, done + 1) / Float::with_val(prec, steps);
            let t = &a + &(&b - &a).scale_real(&s);
            let fiber = family
                .fiber_complex(&t)
                .map_err(|e| Error::ContinuationFailure {
                    segment: seg,
                    reason: e.to_string(),
                })?;
            let target = period_lattice(&fiber, prec).map_err(|e| Error::ContinuationFailure {
                segment: seg,
                reason: e.to_string(),
            })?;
            match match_basis(&current, &target) {
                Some(next) => {
                    current = next;
                    done += 1;
                }
                None => {
                    refinements += 1;
                    if refinements > MAX_REFINEMENTS {
                        return Err(Error::ContinuationFailure {
                            segment: seg,
                            reason: "ambiguous lattice matching after 20 refinements".into(),
                        });
                    }
                    done *= 2;
                    steps *= 2;
                }
            }
        }
    }
    Ok(current)
}

/// Monodromy of the period lattice along a closed loop, based at its first
/// waypoint: continued `(omega1, omega2)^T = M (omega1, omega2)^T`.
pub fn monodromy(family: &CurveFamily, lp: &ParamPath, prec: u32) -> Result<MonodromyMatrix> {
    if !lp.is_closed() {
        return Err(Error::domain("monodromy needs a closed loop"));
    }
    let base = lp.waypoints[0].with_prec(prec);
    let start = period_lattice(&family.fiber_complex(&base)?, prec)?;
    let end = continue_basis(family, lp, &start)?;
    let m = MonodromyMatrix(start.change_of_basis(&end)?);
    if m.det() != 1 {
        return Err(Error::numeric(format!(
            "monodromy matrix {:?} has determinant {}",
            m.0,
            m.det()
        )));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn constant_and_contractible() {
        let fam = CurveFamily::legendre();
        let p = ParamPath::new(&fam, vec![BigComplex::from_f64(0.5, 0.3, 128); 2], 0.1).unwrap();
        let start = period_lattice(&fam.fiber_complex(&p.waypoints[0]).unwrap(), 128).unwrap();
        assert_eq!(continue_basis(&fam, &p, &start).unwrap(), start);
        let small = ParamPath::circle(&fam, (0.5, 0.0), 0.2, 0.0, 16, 128).unwrap();
        assert_eq!(monodromy(&fam, &small, 128).unwrap(), MonodromyMatrix::identity());
    }

    #[test]
    fn legendre_loop_around_zero_is_unipotent_of_level_two() {
        let fam = CurveFamily::legendre();
        let lp = ParamPath::circle(&fam, (0.0, 0.0), 0.5, 0.0, 24, 128).unwrap();
        let m = monodromy(&fam, &lp, 128).unwrap();
        assert_eq!(m.trace(), 2);
        assert_ne!(m, MonodromyMatrix::identity());
        let g = gcd(gcd(m.0[0][0] - 1, m.0[0][1]), gcd(m.0[1][0], m.0[1][1] - 1));
        assert_eq!(g, 2);
    }

    #[test]
    fn path_through_singularity_rejected() {
        let fam = CurveFamily::legendre();
        assert!(ParamPath::new(&fam, vec![BigComplex::zero(128)], 0.1).is_err());
    }
}
