//! Built-in curves with analytic derivatives.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::jet::{jv_scale, Jet, JetVec};

use super::curve::{principal_normal, Ambient, CurveData, FieldKind};

/// `name[:key=value,...]`, e.g. `ellipse:a=1,b=2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), r),
            None => (s.trim(), ""),
        };
        if name.is_empty() {
            return Err(Error::Config("empty curve name".into()));
        }
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("curve parameter '{item}' is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("curve parameter '{item}' is not a number")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(CurveSpec {
            name: name.to_string(),
            params,
        })
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// One catalog entry, for listings.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub ambient: Ambient,
    pub params: &'static [(&'static str, f64)],
    pub about: &'static str,
}

const DOMAIN: [(&str, f64); 2] = [("lo", -1.0), ("hi", 1.0)];

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "timelike-line",
        ambient: Ambient::Lorentz,
        params: &[],
        about: "f = t e0, V = e1 (flat data)",
    },
    CatalogEntry {
        name: "lorentz-helix",
        ambient: Ambient::Lorentz,
        params: &[],
        about: "f = (2t, cos t, sin t), V = √3 (0, cos t, sin t)",
    },
    CatalogEntry {
        name: "spacelike-line",
        ambient: Ambient::Lorentz,
        params: &[],
        about: "f = t e1, V = e0",
    },
    CatalogEntry {
        name: "lcircle",
        ambient: Ambient::Lorentz,
        params: &[("rho", 1.0)],
        about: "f = ρ(0, sin t, cos t), V = ρ e0 (timelike-axis revolution)",
    },
    CatalogEntry {
        name: "null-axis",
        ambient: Ambient::Lorentz,
        params: &[("H", 0.5)],
        about: "null line with null V (null-axis revolution)",
    },
    CatalogEntry {
        name: "ellipse",
        ambient: Ambient::Euclid,
        params: &[("a", 1.0), ("b", 2.0)],
        about: "(a sin t, b cos t, 0) with its principal normal",
    },
    CatalogEntry {
        name: "parabola",
        ambient: Ambient::Euclid,
        params: &[],
        about: "(t, t², 0) with its principal normal",
    },
    CatalogEntry {
        name: "catenary",
        ambient: Ambient::Euclid,
        params: &[],
        about: "(t, cosh t, 0) with its principal normal",
    },
    CatalogEntry {
        name: "cubic",
        ambient: Ambient::Euclid,
        params: &[],
        about: "(t² − 1, t(t² − 1), 0) with its principal normal",
    },
    CatalogEntry {
        name: "lemniscate",
        ambient: Ambient::Euclid,
        params: &[],
        about: "Bernoulli's lemniscate with its principal normal",
    },
    CatalogEntry {
        name: "circle",
        ambient: Ambient::Euclid,
        params: &[("r", 1.0)],
        about: "(r cos t, r sin t, 0) with its principal normal",
    },
    CatalogEntry {
        name: "helix",
        ambient: Ambient::Euclid,
        params: &[("r", 1.0), ("c", 0.5)],
        about: "(r cos t, r sin t, ct) with its principal normal (nowhere parallel)",
    },
    CatalogEntry {
        name: "asymptotic-helix",
        ambient: Ambient::Euclid,
        params: &[("sign", 1.0)],
        about: "(½cos t, ½sin t, t/2) with N = ±binormal (torsion 1)",
    },
    CatalogEntry {
        name: "line",
        ambient: Ambient::Euclid,
        params: &[],
        about: "straight line; rejected (no curvature)",
    },
];

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}

fn jet_const(v: f64) -> Jet {
    Jet::constant(v)
}

/// Normal pointing away from the centre of curvature: `⟨f', N'⟩ > 0`.
fn outer_normal(p: &JetVec) -> JetVec {
    jv_scale(&principal_normal(p), jet_const(-1.0))
}

/// Build a catalog curve.
pub fn catalog_curve(spec: &CurveSpec) -> Result<CurveData> {
    let entry = lookup(&spec.name).ok_or_else(|| {
        Error::Config(format!(
            "unknown curve '{}'; see `surfcauchy catalog`",
            spec.name
        ))
    })?;
    let allowed = |k: &str| {
        DOMAIN.iter().any(|(d, _)| *d == k) || entry.params.iter().any(|(p, _)| *p == k) || k == "t0"
    };
    if let Some(k) = spec.params.keys().find(|k| !allowed(k)) {
        return Err(Error::Config(format!(
            "curve '{}' has no parameter '{k}'",
            entry.name
        )));
    }
    let get = |k: &str| -> f64 {
        spec.params.get(k).copied().unwrap_or_else(|| {
            entry
                .params
                .iter()
                .chain(DOMAIN.iter())
                .find(|(p, _)| *p == k)
                .map(|(_, v)| *v)
                .unwrap_or(0.0)
        })
    };
    let default_domain = if entry.name == "null-axis" {
        (-0.5, 0.5)
    } else {
        (-1.0, 1.0)
    };
    let domain = (
        spec.params.get("lo").copied().unwrap_or(default_domain.0),
        spec.params.get("hi").copied().unwrap_or(default_domain.1),
    );
    if !(domain.0 < domain.1) || !domain.0.is_finite() || !domain.1.is_finite() {
        return Err(Error::Config(format!("invalid curve domain {domain:?}")));
    }
    let lor = |p: fn(Jet) -> JetVec, v: fn(Jet) -> JetVec| {
        CurveData::from_jets(entry.name, Ambient::Lorentz, FieldKind::Velocity, domain, p, v)
    };
    let data = match entry.name {
        "timelike-line" => lor(|t| [t, Jet::constant(0.0), Jet::constant(0.0)], |_| {
            [Jet::constant(0.0), Jet::constant(1.0), Jet::constant(0.0)]
        }),
        "lorentz-helix" => lor(
            |t| {
                let (s, c) = t.sin_cos();
                [t * 2.0, c, s]
            },
            |t| {
                let (s, c) = t.sin_cos();
                let r3 = 3f64.sqrt();
                [Jet::constant(0.0), c * r3, s * r3]
            },
        ),
        "spacelike-line" => lor(|t| [Jet::constant(0.0), t, Jet::constant(0.0)], |_| {
            [Jet::constant(1.0), Jet::constant(0.0), Jet::constant(0.0)]
        }),
        "lcircle" => {
            let rho = get("rho");
            if !(rho > 0.0) {
                return Err(Error::Config("rho must be positive".into()));
            }
            CurveData::from_jets(
                entry.name,
                Ambient::Lorentz,
                FieldKind::Velocity,
                domain,
                move |t: Jet| {
                    let (s, c) = t.sin_cos();
                    [jet_const(0.0), s * rho, c * rho]
                },
                move |_| [jet_const(rho), jet_const(0.0), jet_const(0.0)],
            )
        }
        "null-axis" => {
            let h = get("H");
            if !(h > 0.0) {
                return Err(Error::Config("null-axis needs H > 0".into()));
            }
            CurveData::from_jets(
                entry.name,
                Ambient::Lorentz,
                FieldKind::Velocity,
                domain,
                move |t: Jet| [t / h, t / h, jet_const(-0.5 / h)],
                move |t: Jet| {
                    let t2 = t * t;
                    [(-t2 - 1.0) / h, (-t2 + 1.0) / h, t * (2.0 / h)]
                },
            )
        }
        _ => {
            let pos: Box<dyn Fn(Jet) -> JetVec + Send + Sync> = match entry.name {
                "ellipse" => {
                    let (a, b) = (get("a"), get("b"));
                    if !(a > 0.0 && b > 0.0) {
                        return Err(Error::Config("ellipse needs a, b > 0".into()));
                    }
                    Box::new(move |t: Jet| {
                        let (s, c) = t.sin_cos();
                        [s * a, c * b, jet_const(0.0)]
                    })
                }
                "parabola" => Box::new(|t: Jet| [t, t * t, jet_const(0.0)]),
                "catenary" => Box::new(|t: Jet| [t, t.cosh(), jet_const(0.0)]),
                "cubic" => Box::new(|t: Jet| {
                    let q = t * t - 1.0;
                    [q, t * q, jet_const(0.0)]
                }),
                "lemniscate" => Box::new(|t: Jet| {
                    let (s, c) = t.sin_cos();
                    let d = (s * s + 1.0).recip();
                    [c * d, s * c * d, jet_const(0.0)]
                }),
                "circle" => {
                    let r = get("r");
                    if !(r > 0.0) {
                        return Err(Error::Config("circle needs r > 0".into()));
                    }
                    Box::new(move |t: Jet| {
                        let (s, c) = t.sin_cos();
                        [c * r, s * r, jet_const(0.0)]
                    })
                }
                "helix" => {
                    let (r, c) = (get("r"), get("c"));
                    if !(r > 0.0) {
                        return Err(Error::Config("helix needs r > 0".into()));
                    }
                    Box::new(move |t: Jet| {
                        let (s, co) = t.sin_cos();
                        [co * r, s * r, t * c]
                    })
                }
                "asymptotic-helix" => {
                    let sign = get("sign");
                    if sign.abs() != 1.0 {
                        return Err(Error::Config("sign must be 1 or -1".into()));
                    }
                    let data = CurveData::from_jets(
                        entry.name,
                        Ambient::Euclid,
                        FieldKind::Normal,
                        domain,
                        |t: Jet| {
                            let (s, c) = t.sin_cos();
                            [c * 0.5, s * 0.5, t * 0.5]
                        },
                        move |t: Jet| {
                            let (s, c) = t.sin_cos();
                            let k = sign / 2f64.sqrt();
                            [s * k, c * -k, jet_const(k)]
                        },
                    );
                    return Ok(finish(data, spec));
                }
                "line" => {
                    return Err(Error::hypothesis(
                        "a straight line has no curvature, so no principal normal",
                        domain.0,
                        domain.1,
                    ))
                }
                _ => unreachable!("catalog entry without constructor"),
            };
            let pos = std::sync::Arc::new(pos);
            let pos2 = pos.clone();
            CurveData::from_jets(
                entry.name,
                Ambient::Euclid,
                FieldKind::Normal,
                domain,
                move |t| pos(t),
                move |t| outer_normal(&pos2(t)),
            )
        }
    };
    Ok(finish(data, spec))
}

fn finish(data: CurveData, spec: &CurveSpec) -> CurveData {
    match spec.params.get("t0") {
        Some(&t0) => data.with_t0(t0),
        None => data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(s: &str) -> CurveData {
        catalog_curve(&s.parse().unwrap()).unwrap()
    }

    fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[test]
    fn spec_parsing_roundtrip() {
        let s: CurveSpec = "ellipse:a=1,b=2".parse().unwrap();
        assert_eq!(s.name, "ellipse");
        assert_eq!(s.params["b"], 2.0);
        assert_eq!(s.to_string(), "ellipse:a=1,b=2");
        assert!("ellipse:a".parse::<CurveSpec>().is_err());
        assert!("ellipse:a=x".parse::<CurveSpec>().is_err());
        assert!(catalog_curve(&"ellipse:q=1".parse().unwrap()).is_err());
        assert!(catalog_curve(&"nosuch".parse().unwrap()).is_err());
    }

    #[test]
    fn parabola_matches_the_stated_normal() {
        let c = curve("parabola");
        for t in [-0.8, 0.0, 0.3] {
            let p = c.point(t);
            let s = (1.0 + 4.0 * t * t).sqrt();
            let want = [2.0 * t / s, -1.0 / s, 0.0];
            for k in 0..3 {
                assert!((p.field[k] - want[k]).abs() < 1e-14);
            }
            assert_eq!(p.pos, [t, t * t, 0.0]);
            assert!(dot(p.d1, p.field_d1) > 0.0);
        }
    }

    #[test]
    fn lemniscate_parameterization() {
        let c = curve("lemniscate");
        let t: f64 = 0.4;
        let d = 1.0 + t.sin().powi(2);
        let p = c.point(t);
        assert!((p.pos[0] - t.cos() / d).abs() < 1e-15);
        assert!((p.pos[1] - (2.0 * t).sin() / (2.0 * d)).abs() < 1e-15);
    }

    #[test]
    fn derivatives_agree_with_differences() {
        for name in [
            "lorentz-helix",
            "null-axis",
            "lcircle:rho=2",
            "ellipse",
            "catenary",
            "cubic",
            "lemniscate",
            "helix",
            "asymptotic-helix",
        ] {
            let c = curve(name);
            let h = 1e-4;
            for t in [-0.3, 0.2] {
                let (p, pp, pm) = (c.point(t), c.point(t + h), c.point(t - h));
                for k in 0..3 {
                    let d1 = (pp.pos[k] - pm.pos[k]) / (2.0 * h);
                    let d2 = (pp.pos[k] - 2.0 * p.pos[k] + pm.pos[k]) / (h * h);
                    let v1 = (pp.field[k] - pm.field[k]) / (2.0 * h);
                    assert!((d1 - p.d1[k]).abs() < 1e-7, "{name}");
                    assert!((d2 - p.d2[k]).abs() < 1e-5, "{name}");
                    assert!((v1 - p.field_d1[k]).abs() < 1e-7, "{name}");
                }
            }
        }
    }

    #[test]
    fn line_is_rejected() {
        let r = catalog_curve(&"line".parse().unwrap());
        assert!(matches!(r, Err(Error::HypothesisViolation { .. })));
    }
}
