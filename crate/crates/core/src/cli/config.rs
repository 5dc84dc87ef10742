//! Job configuration: a flat `key = value` file plus overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framegen::{FrameOptions, StepRule};
use crate::loopcore::BirkhoffOptions;
use crate::par::Execution;

use super::expr::parse_expression;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    /// Timelike CMC surface through a non-null curve with a transverse field.
    Cmc,
    /// Timelike CMC surface through a null curve, with free `α`, `β`.
    CmcNull,
    /// Timelike CMC surface of revolution about a timelike or null axis.
    CmcRevolution,
    /// K = −1 surface through a non-asymptotic curve with a normal field.
    Psph,
    /// K = −1 surface through an asymptotic curve, with free complex `α`.
    PsphAsymptotic,
}

impl Problem {
    pub const ALL: [Problem; 5] = [
        Problem::Cmc,
        Problem::CmcNull,
        Problem::CmcRevolution,
        Problem::Psph,
        Problem::PsphAsymptotic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Cmc => "cmc",
            Problem::CmcNull => "cmc-null",
            Problem::CmcRevolution => "cmc-revolution",
            Problem::Psph => "psph",
            Problem::PsphAsymptotic => "psph-asymptotic",
        }
    }

    pub fn is_cmc(self) -> bool {
        matches!(self, Problem::Cmc | Problem::CmcNull | Problem::CmcRevolution)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown problem '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Timelike,
    Null,
}

/// Pass/fail thresholds of the diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub cauchy: f64,
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
    pub geodesic: f64,
    pub sine_gordon: f64,
    pub codazzi: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cauchy: 1e-5,
            mean_curvature: 1e-3,
            gauss_curvature: 1e-2,
            geodesic: 1e-3,
            sine_gordon: 1e-2,
            codazzi: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub problem: Problem,
    /// Catalog spec `name:k=v,...`.
    pub curve: Option<String>,
    /// Curve CSV `t,fx,fy,fz[,vx,vy,vz]`, used instead of `curve`.
    pub curve_csv: Option<PathBuf>,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub axis: Axis,
    pub rho: f64,
    /// Require the prescribed normal to be the principal normal, so that the
    /// curve is a geodesic, and check it.
    pub geodesic: bool,
    pub n: usize,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub truncation: usize,
    pub samples: usize,
    pub steps_per_unit: usize,
    pub store_tol: f64,
    pub max_condition: f64,
    pub max_residual: f64,
    pub lambda: Vec<f64>,
    pub sequential: bool,
    pub out: PathBuf,
    pub obj: bool,
    pub csv: bool,
    pub tol: Tolerances,
}

impl Default for JobConfig {
    fn default() -> Self {
        let b = BirkhoffOptions::default();
        let f = FrameOptions::default();
        JobConfig {
            problem: Problem::Cmc,
            curve: None,
            curve_csv: None,
            h: None,
            alpha: None,
            beta: None,
            axis: Axis::Timelike,
            rho: 1.0,
            geodesic: false,
            n: 81,
            x_range: None,
            y_range: None,
            nx: None,
            ny: None,
            truncation: b.truncation,
            samples: f.samples,
            steps_per_unit: f.steps.per_unit,
            store_tol: f.store_tol,
            max_condition: b.max_condition,
            max_residual: b.max_residual,
            lambda: vec![1.0],
            sequential: false,
            out: PathBuf::from("surface"),
            obj: true,
            csv: true,
            tol: Tolerances::default(),
        }
    }
}

/// Keys accepted in config files and `--set`.
pub const KEYS: &[&str] = &[
    "problem",
    "curve",
    "curve_csv",
    "H",
    "alpha",
    "beta",
    "axis",
    "rho",
    "geodesic",
    "n",
    "x_range",
    "y_range",
    "nx",
    "ny",
    "truncation",
    "samples",
    "steps_per_unit",
    "store_tol",
    "max_condition",
    "max_residual",
    "lambda",
    "sequential",
    "out",
    "obj",
    "csv",
    "tol_cauchy",
    "tol_mean_curvature",
    "tol_gauss_curvature",
    "tol_geodesic",
    "tol_sine_gordon",
    "tol_codazzi",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got '{v}'"))),
    }
}

fn range(key: &str, v: &str) -> Result<(f64, f64)> {
    let (a, b) = v
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("{key}: expected 'lo,hi'")))?;
    Ok((num(key, a.trim())?, num(key, b.trim())?))
}

impl JobConfig {
    /// Set one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "problem" => self.problem = v.parse()?,
            "curve" => self.curve = Some(v.to_string()),
            "curve_csv" => self.curve_csv = Some(PathBuf::from(v)),
            "H" => self.h = Some(num(key, v)?),
            "alpha" => self.alpha = Some(v.to_string()),
            "beta" => self.beta = Some(v.to_string()),
            "axis" => {
                self.axis = match v {
                    "timelike" => Axis::Timelike,
                    "null" => Axis::Null,
                    _ => return Err(Error::Config(format!("axis must be timelike or null, got '{v}'"))),
                }
            }
            "rho" => self.rho = num(key, v)?,
            "geodesic" => self.geodesic = boolean(key, v)?,
            "n" => self.n = num(key, v)?,
            "x_range" => self.x_range = Some(range(key, v)?),
            "y_range" => self.y_range = Some(range(key, v)?),
            "nx" => self.nx = Some(num(key, v)?),
            "ny" => self.ny = Some(num(key, v)?),
            "truncation" => self.truncation = num(key, v)?,
            "samples" => self.samples = num(key, v)?,
            "steps_per_unit" => self.steps_per_unit = num(key, v)?,
            "store_tol" => self.store_tol = num(key, v)?,
            "max_condition" => self.max_condition = num(key, v)?,
            "max_residual" => self.max_residual = num(key, v)?,
            "lambda" => {
                self.lambda = v
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "sequential" => self.sequential = boolean(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "obj" => self.obj = boolean(key, v)?,
            "csv" => self.csv = boolean(key, v)?,
            "tol_cauchy" => self.tol.cauchy = num(key, v)?,
            "tol_mean_curvature" => self.tol.mean_curvature = num(key, v)?,
            "tol_gauss_curvature" => self.tol.gauss_curvature = num(key, v)?,
            "tol_geodesic" => self.tol.geodesic = num(key, v)?,
            "tol_sine_gordon" => self.tol.sine_gordon = num(key, v)?,
            "tol_codazzi" => self.tol.codazzi = num(key, v)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", k + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", k + 1)))?;
        }
        Ok(())
    }

    /// Apply `key=value` overrides.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, items: &[S]) -> Result<()> {
        for item in items {
            let (k, v) = item
                .as_ref()
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{}' is not key=value", item.as_ref())))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.curve.is_some() && self.curve_csv.is_some() {
            return bad("give either curve or curve_csv, not both".into());
        }
        if self.problem == Problem::Cmc && self.curve.is_none() && self.curve_csv.is_none() {
            return bad("problem cmc needs a curve".into());
        }
        if self.problem == Problem::Psph && self.curve.is_none() && self.curve_csv.is_none() {
            return bad("problem psph needs a curve".into());
        }
        if matches!(self.problem, Problem::Cmc | Problem::CmcRevolution) && self.h.is_none() {
            return bad(format!("problem {} needs H", self.problem));
        }
        if let Some(h) = self.h {
            if !(h.is_finite() && h != 0.0) {
                return bad("H must be finite and non-zero".into());
            }
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho must be positive".into());
        }
        if self.n < 5 || self.nx.is_some_and(|n| n < 5) || self.ny.is_some_and(|n| n < 5) {
            return bad("grids need at least 5 nodes per direction".into());
        }
        for (k, r) in [("x_range", self.x_range), ("y_range", self.y_range)] {
            if let Some((a, b)) = r {
                if !(a < b && a.is_finite() && b.is_finite()) {
                    return bad(format!("{k} must satisfy lo < hi"));
                }
            }
        }
        if self.truncation < 2 {
            return bad("truncation must be at least 2".into());
        }
        if self.samples < 4 * self.truncation + 2 {
            return bad(format!(
                "samples must be at least 4*truncation+2 = {}",
                4 * self.truncation + 2
            ));
        }
        if self.steps_per_unit == 0 {
            return bad("steps_per_unit must be positive".into());
        }
        if self.lambda.is_empty() || self.lambda.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return bad("lambda values must be positive".into());
        }
        if !self.problem.is_cmc() && self.lambda.iter().any(|&l| l != 1.0) {
            // the unitary real form lives on the unit circle only
            return bad("K-surfaces are built at lambda = 1 only".into());
        }
        for (name, src) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if let Some(s) = src {
                let e = parse_expression(s)?;
                if self.problem.is_cmc() && !e.is_real() {
                    return bad(format!("{name} must be real for CMC problems"));
                }
            }
        }
        if self.beta.is_some() && self.problem == Problem::PsphAsymptotic {
            return bad("beta is not used by psph-asymptotic".into());
        }
        let t = &self.tol;
        for v in [t.cauchy, t.mean_curvature, t.gauss_curvature, t.geodesic, t.sine_gordon, t.codazzi] {
            if !(v > 0.0) {
                return bad("tolerances must be positive".into());
            }
        }
        Ok(())
    }

    pub fn frame_options(&self) -> FrameOptions {
        FrameOptions {
            samples: self.samples,
            birkhoff: BirkhoffOptions {
                truncation: self.truncation,
                max_condition: self.max_condition,
                max_residual: self.max_residual,
                ..BirkhoffOptions::default()
            },
            steps: StepRule {
                per_unit: self.steps_per_unit,
                ..StepRule::default()
            },
            store_tol: self.store_tol,
            exec: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_overrides() {
        let mut c = JobConfig::default();
        c.apply_text("problem = psph  # K-surface\ncurve = ellipse:a=1,b=2\n\nn=41\nx_range = -1, 0.5\n")
            .unwrap();
        c.apply_overrides(&["n=21", "geodesic=true"]).unwrap();
        assert_eq!(c.problem, Problem::Psph);
        assert_eq!(c.curve.as_deref(), Some("ellipse:a=1,b=2"));
        assert_eq!(c.n, 21);
        assert_eq!(c.x_range, Some((-1.0, 0.5)));
        assert!(c.geodesic);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let mut c = JobConfig::default();
        assert!(matches!(c.apply_text("colour = red"), Err(Error::Config(_))));
        assert!(c.set("n", "many").is_err());
        assert!(c.set("axis", "spacelike").is_err());
        assert!(c.apply_overrides(&["n"]).is_err());
    }

    #[test]
    fn every_listed_key_is_settable() {
        let sample = |k: &str| match k {
            "problem" => "cmc-null",
            "curve" => "null-axis",
            "curve_csv" => "c.csv",
            "alpha" | "beta" => "1",
            "axis" => "null",
            "geodesic" | "sequential" | "obj" | "csv" => "false",
            "x_range" | "y_range" => "-1,1",
            "lambda" => "1,2",
            "out" => "o",
            "n" | "nx" | "ny" | "truncation" | "samples" | "steps_per_unit" => "9",
            _ => "0.5",
        };
        for k in KEYS {
            JobConfig::default().set(k, sample(k)).unwrap();
        }
    }

    #[test]
    fn validation() {
        let ok = |items: &[&str]| {
            let mut c = JobConfig::default();
            c.apply_overrides(items).unwrap();
            c.validate()
        };
        assert!(ok(&["curve=lcircle", "H=-0.5"]).is_ok());
        assert!(ok(&["curve=lcircle"]).is_err());
        assert!(ok(&["curve=lcircle", "H=0"]).is_err());
        assert!(ok(&["curve=lcircle", "H=1", "samples=60"]).is_err());
        assert!(ok(&["problem=cmc-null", "alpha=1+"]).is_err());
        assert!(ok(&["problem=cmc-null", "alpha=i"]).is_err());
        assert!(ok(&["problem=psph-asymptotic", "alpha=0.4+0.1*i"]).is_ok());
        assert!(ok(&["problem=psph", "curve=circle", "lambda=2"]).is_err());
        assert!(ok(&["problem=psph"]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let c = JobConfig::default();
        let back: JobConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
