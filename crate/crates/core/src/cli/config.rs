use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::elliptic::{CurveFamily, Section};
use crate::error::{Error, Result};
use crate::fibration::{fermat_double_fibration, Generator, ScheduleKind};
use crate::locus::ScanWindow;
use crate::numerics::{BigComplex, Rational, MIN_PRECISION};

pub const EXPERIMENTS: [&str; 9] = [
    "scan-torsion",
    "orbit",
    "periods",
    "betti",
    "heights",
    "monodromy",
    "isogeny",
    "count-rational",
    "exceptional-scan",
];

pub const MAX_PRECISION: u32 = 4096;
pub const MAX_ORDER: u32 = 64;
pub const MAX_BUDGET: usize = 1_000_000;
pub const DEFAULT_OUTPUT: &str = "out";

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Named families with a distinguished section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    /// `y^2 = x^3 + t x + 1` with the section `(0, 1)`.
    Demo,
    /// Minimized fibers of the Fermat quartic along the `lambda` pencil.
    FermatLambda,
    /// Same along the `mu` pencil.
    FermatMu,
}

impl FamilyName {
    pub fn build(self) -> Result<(CurveFamily, Section)> {
        match self {
            FamilyName::Demo => Ok((CurveFamily::demo(), Section::demo())),
            FamilyName::FermatLambda => fermat_double_fibration().symbolic_family(Generator::Sigma),
            FamilyName::FermatMu => fermat_double_fibration().symbolic_family(Generator::Tau),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub re: [f64; 2],
    pub im: [f64; 2],
    #[serde(default = "default_density")]
    pub grid_density: f64,
    pub denominator_bound: u32,
}

fn default_density() -> f64 {
    4.0
}

impl WindowSpec {
    pub fn build(&self) -> Result<ScanWindow> {
        if self.denominator_bound > MAX_ORDER {
            return Err(config_err(format!("denominator_bound must be at most {}", MAX_ORDER)));
        }
        if !(self.grid_density <= 256.0) {
            return Err(config_err("grid_density must be at most 256"));
        }
        ScanWindow::new((self.re[0], self.re[1]), (self.im[0], self.im[1]), self.grid_density, self.denominator_bound)
            .map_err(|e| config_err(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    pub family: FamilyName,
    pub window: WindowSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountParams {
    pub family: FamilyName,
    pub window: WindowSpec,
    pub bound: u32,
}

/// Parameters are `"re"` or `"re im"` decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointParams {
    pub family: FamilyName,
    pub parameters: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightsParams {
    pub family: FamilyName,
    pub max_n: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "default_loop_points")]
    pub points: usize,
}

fn default_loop_points() -> usize {
    16
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyParams {
    pub family: FamilyName,
    pub loops: Vec<LoopSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeedSpec {
    /// Point on the fiber of `generator` over `s` with Weierstrass abscissa `x`.
    Sample { generator: String, s: String, x: String },
    /// The `index`-th point with torsion sections of the given orders on both fibers.
    Torsion { orders: [u32; 2], index: usize },
    /// Projective coordinates, refined onto the surface.
    Point { coords: [String; 4] },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitParams {
    pub seeds: Vec<SeedSpec>,
    pub schedule: ScheduleKind,
    pub budget: usize,
    #[serde(default)]
    pub match_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsogenyParams {
    pub level: u32,
    /// Rational value of the second parameter, e.g. `"11/4"`.
    pub u: String,
    pub bound: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionalParams {
    pub window: WindowSpec,
}

#[derive(Clone, Debug)]
pub enum Experiment {
    ScanTorsion(ScanParams),
    Orbit(OrbitParams),
    Periods(PointParams),
    Betti(PointParams),
    Heights(HeightsParams),
    Monodromy(MonodromyParams),
    Isogeny(IsogenyParams),
    CountRational(CountParams),
    ExceptionalScan(ExceptionalParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ScanTorsion(_) => "scan-torsion",
            Experiment::Orbit(_) => "orbit",
            Experiment::Periods(_) => "periods",
            Experiment::Betti(_) => "betti",
            Experiment::Heights(_) => "heights",
            Experiment::Monodromy(_) => "monodromy",
            Experiment::Isogeny(_) => "isogeny",
            Experiment::CountRational(_) => "count-rational",
            Experiment::ExceptionalScan(_) => "exceptional-scan",
        }
    }
}

/// One experiment with its precision and output directory.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub precision_bits: u32,
    pub output_dir: PathBuf,
    /// The parsed file, echoed into the manifest.
    pub echo: Value,
}

fn params<T: DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| config_err(format!("bad params: {}", e)))
}

pub fn parse_complex(s: &str, prec: u32) -> Result<BigComplex> {
    BigComplex::parse(s, prec).ok_or_else(|| config_err(format!("bad complex number {:?}", s)))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|_| config_err(format!("bad rational {:?}", s)))
}

pub fn parse_generator(s: &str) -> Result<Generator> {
    match s {
        "sigma" => Ok(Generator::Sigma),
        "tau" => Ok(Generator::Tau),
        _ => Err(config_err(format!("generator must be \"sigma\" or \"tau\", got {:?}", s))),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {}", e)))?;
        RunConfig::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| config_err("config must be a JSON object"))?;
        for k in obj.keys() {
            if !["experiment", "precision_bits", "output_dir", "deterministic", "params"].contains(&k.as_str()) {
                return Err(config_err(format!("unknown field {:?}", k)));
            }
        }
        let name = obj
            .get("experiment")
            .and_then(Value::as_str)
            .ok_or_else(|| config_err("missing experiment"))?;
        let p = obj.get("params").cloned().unwrap_or(Value::Object(Default::default()));
        let experiment = match name {
            "scan-torsion" => Experiment::ScanTorsion(params(&p)?),
            "orbit" => Experiment::Orbit(params(&p)?),
            "periods" => Experiment::Periods(params(&p)?),
            "betti" => Experiment::Betti(params(&p)?),
            "heights" => Experiment::Heights(params(&p)?),
            "monodromy" => Experiment::Monodromy(params(&p)?),
            "isogeny" => Experiment::Isogeny(params(&p)?),
            "count-rational" => Experiment::CountRational(params(&p)?),
            "exceptional-scan" => Experiment::ExceptionalScan(params(&p)?),
            other => {
                return Err(config_err(format!(
                    "unknown experiment {:?} (expected one of {})",
                    other,
                    EXPERIMENTS.join(", ")
                )))
            }
        };
        if let Some(d) = obj.get("deterministic") {
            if d != &Value::Bool(true) {
                return Err(config_err("deterministic cannot be turned off"));
            }
        }
        let precision_bits = match obj.get("precision_bits") {
            None => crate::numerics::DEFAULT_PRECISION,
            Some(x) => x
                .as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| config_err("precision_bits must be a positive integer"))?,
        };
        let output_dir = match obj.get("output_dir") {
            None => PathBuf::from(DEFAULT_OUTPUT),
            Some(x) => PathBuf::from(x.as_str().ok_or_else(|| config_err("output_dir must be a string"))?),
        };
        let cfg = RunConfig { experiment, precision_bits, output_dir, echo: v };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_precision(mut self, bits: u32) -> Result<Self> {
        self.precision_bits = bits;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&self.precision_bits) {
            return Err(config_err(format!(
                "precision_bits must lie in [{}, {}]",
                MIN_PRECISION, MAX_PRECISION
            )));
        }
        match &self.experiment {
            Experiment::ScanTorsion(p) => {
                p.window.build()?;
            }
            Experiment::CountRational(p) => {
                p.window.build()?;
                if p.bound < 1 || p.bound > MAX_ORDER {
                    return Err(config_err(format!("bound must lie in [1, {}]", MAX_ORDER)));
                }
            }
            Experiment::ExceptionalScan(p) => {
                p.window.build()?;
                if p.window.denominator_bound > 12 {
                    return Err(config_err("exceptional-scan denominator_bound must be at most 12"));
                }
            }
            Experiment::Periods(p) | Experiment::Betti(p) => {
                for s in &p.parameters {
                    parse_complex(s, self.precision_bits)?;
                }
            }
            Experiment::Heights(p) => {
                if p.max_n < 2 || p.max_n > 24 {
                    return Err(config_err("max_n must lie in [2, 24]"));
                }
            }
            Experiment::Monodromy(p) => {
                for l in &p.loops {
                    if !(l.radius > 0.0) || l.points < 3 || l.points > 4096 {
                        return Err(config_err("loops need a positive radius and 3..=4096 points"));
                    }
                }
            }
            Experiment::Orbit(p) => {
                if p.budget < 1 || p.budget > MAX_BUDGET {
                    return Err(config_err(format!("budget must lie in [1, {}]", MAX_BUDGET)));
                }
                if let Some(t) = p.match_tol {
                    if !(t > 0.0 && t < 1.0) {
                        return Err(config_err("match_tol must lie in (0, 1)"));
                    }
                }
                for s in &p.seeds {
                    match s {
                        SeedSpec::Sample { generator, s, x } => {
                            parse_generator(generator)?;
                            parse_complex(s, self.precision_bits)?;
                            parse_complex(x, self.precision_bits)?;
                        }
                        SeedSpec::Torsion { orders, .. } => {
                            if orders.iter().any(|&n| n < 1 || n > 12) {
                                return Err(config_err("torsion seed orders must lie in [1, 12]"));
                            }
                        }
                        SeedSpec::Point { coords } => {
                            for c in coords {
                                parse_complex(c, self.precision_bits)?;
                            }
                        }
                    }
                }
            }
            Experiment::Isogeny(p) => {
                if !crate::isogeny::SUPPORTED_LEVELS.contains(&p.level) && p.level != 1 {
                    return Err(config_err(format!("unsupported isogeny level {}", p.level)));
                }
                if p.bound < 1 || p.bound > 1000 {
                    return Err(config_err("bound must lie in [1, 1000]"));
                }
                parse_rational(&p.u)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_experiment() {
        let e = RunConfig::from_json(r#"{"experiment": "nope"}"#).unwrap_err();
        assert!(e.to_string().contains("unknown experiment"));
    }

    #[test]
    fn scan_config_round_trip() {
        let c = RunConfig::from_json(
            r#"{"experiment": "scan-torsion", "precision_bits": 128,
                "params": {"family": "demo", "window": {"re": [-3, 1], "im": [-1, 1], "denominator_bound": 4}}}"#,
        )
        .unwrap();
        assert_eq!(c.experiment.name(), "scan-torsion");
        assert_eq!(c.precision_bits, 128);
        assert!(c.clone().with_precision(8).is_err());
    }

    #[test]
    fn out_of_bounds_rejected() {
        let bad = [
            r#"{"experiment": "heights", "params": {"family": "demo", "max_n": 1000}}"#,
            r#"{"experiment": "heights", "deterministic": false, "params": {"family": "demo", "max_n": 4}}"#,
            r#"{"experiment": "heights", "params": {"family": "demo", "max_n": 4, "extra": 1}}"#,
            r#"{"experiment": "orbit", "params": {"seeds": [], "schedule": "diagonal", "budget": 0}}"#,
        ];
        for b in bad {
            assert!(matches!(RunConfig::from_json(b), Err(Error::Config(_))), "{}", b);
        }
    }
}
