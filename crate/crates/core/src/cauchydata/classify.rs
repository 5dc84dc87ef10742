//! Case detection and hypothesis checks for Cauchy data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::curve::{Ambient, CurveData, CurvePoint, FieldKind};

/// Relative tolerance for all hypothesis checks.
pub const HYPOTHESIS_TOL: f64 = 1e-8;
/// Number of samples used by [`classify`].
pub const CLASSIFY_SAMPLES: usize = 401;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    /// Timelike curve, spacelike `V`.
    CmcTimelike,
    /// Spacelike curve, timelike `V`.
    CmcSpacelike,
    /// Null curve, null `V`, `⟨f₀', V⟩ > 0`.
    CmcNull,
    /// `N₀'` parallel to `f₀'` everywhere: the curve is a principal curve.
    PsphPrincipal,
    /// `N₀'` nowhere parallel to `f₀'`.
    PsphGeneral,
    /// `⟨f₀', N₀'⟩ ≡ 0`: the curve is an asymptotic curve.
    PsphAsymptotic,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::CmcTimelike => "cmc-timelike",
            CaseKind::CmcSpacelike => "cmc-spacelike",
            CaseKind::CmcNull => "cmc-null",
            CaseKind::PsphPrincipal => "psph-principal",
            CaseKind::PsphGeneral => "psph-general",
            CaseKind::PsphAsymptotic => "psph-asymptotic",
        }
    }

    pub fn is_cmc(self) -> bool {
        matches!(
            self,
            CaseKind::CmcTimelike | CaseKind::CmcSpacelike | CaseKind::CmcNull
        )
    }

    /// Characteristic data: the curve is a coordinate line of the null or
    /// asymptotic coordinates.
    pub fn is_characteristic(self) -> bool {
        matches!(self, CaseKind::CmcNull | CaseKind::PsphAsymptotic)
    }
}

/// Range of a sampled quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinMax {
    pub min: f64,
    pub max: f64,
}

impl MinMax {
    fn of(v: &[f64]) -> Self {
        MinMax {
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Outcome of [`classify`] with the witness quantities that decided it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: CaseKind,
    pub samples: usize,
    /// `⟨f₀', f₀'⟩`.
    pub speed_sqr: MinMax,
    /// CMC: `(⟨V,V⟩ + ⟨f₀',f₀'⟩)/scale`; zero except in the null case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub causal_balance: Option<MinMax>,
    /// CMC: `⟨f₀', V⟩`; K-surfaces: `⟨f₀', N₀'⟩` (after any flip of `N₀`).
    pub cross_term: MinMax,
    /// K-surfaces: `1 − cos²∠(f₀', N₀')`, zero iff parallel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel_discriminant: Option<MinMax>,
    /// Asymptotic case: `max |x − |f₀'|| / |f₀'|` with `x` the torsion
    /// component of the frame connection; nonzero means the curve cannot be
    /// an asymptotic line of a K = −1 surface.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_defect: Option<f64>,
    /// `N₀` was replaced by `−N₀` to make `⟨f₀', N₀'⟩ > 0`.
    pub normal_flipped: bool,
    pub valid: bool,
    pub notes: Vec<String>,
}

pub(crate) fn dot_l(a: [f64; 3], b: [f64; 3]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn dot_e(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross_e(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// First and last parameter where `bad` holds.
fn offending_range(pts: &[CurvePoint], bad: impl Fn(usize) -> bool) -> Option<(f64, f64)> {
    let idx: Vec<usize> = (0..pts.len()).filter(|&i| bad(i)).collect();
    Some((pts[*idx.first()?].t, pts[*idx.last()?].t))
}

fn violation(pts: &[CurvePoint], msg: &str, bad: impl Fn(usize) -> bool) -> Result<()> {
    match offending_range(pts, bad) {
        Some((a, b)) => Err(Error::hypothesis(msg, a, b)),
        None => Ok(()),
    }
}

/// Detect the case of the data and check its hypotheses on
/// [`CLASSIFY_SAMPLES`] uniform samples.
pub fn classify(data: &CurveData) -> Result<CaseReport> {
    let pts = data.samples(CLASSIFY_SAMPLES);
    let euclid_len = |v: [f64; 3]| dot_e(v, v).sqrt();
    violation(&pts, "curve is not regular", |i| {
        euclid_len(pts[i].d1) <= HYPOTHESIS_TOL
    })?;
    match (data.ambient, data.field_kind) {
        (Ambient::Lorentz, FieldKind::Velocity) => classify_cmc(&pts),
        (Ambient::Euclid, FieldKind::Normal) => classify_psph(&pts),
        (a, k) => Err(Error::Curve(format!(
            "field kind {k:?} does not fit ambient {a:?}"
        ))),
    }
}

fn classify_cmc(pts: &[CurvePoint]) -> Result<CaseReport> {
    let n = pts.len();
    let scale: Vec<f64> = pts
        .iter()
        .map(|p| dot_e(p.d1, p.d1) + dot_e(p.field, p.field))
        .collect();
    let qf: Vec<f64> = pts.iter().map(|p| dot_l(p.d1, p.d1)).collect();
    let qv: Vec<f64> = pts.iter().map(|p| dot_l(p.field, p.field)).collect();
    let m: Vec<f64> = pts.iter().map(|p| dot_l(p.d1, p.field)).collect();
    let small = |x: f64, i: usize| x.abs() <= HYPOTHESIS_TOL * scale[i];
    let balance: Vec<f64> = (0..n).map(|i| (qf[i] + qv[i]) / scale[i]).collect();
    let null_f = (0..n).filter(|&i| small(qf[i], i)).count();
    let mut report = CaseReport {
        case: CaseKind::CmcNull,
        samples: n,
        speed_sqr: MinMax::of(&qf),
        causal_balance: Some(MinMax::of(&balance)),
        cross_term: MinMax::of(&m),
        parallel_discriminant: None,
        torsion_defect: None,
        normal_flipped: false,
        valid: true,
        notes: Vec::new(),
    };
    if null_f == n {
        violation(pts, "V is not null", |i| !small(qv[i], i))?;
        violation(pts, "⟨f₀', V⟩ must be positive", |i| {
            m[i] <= HYPOTHESIS_TOL * scale[i]
        })?;
        return Ok(report);
    }
    if null_f > 0 {
        let pos = qf.iter().any(|&q| q > 0.0);
        let neg = qf.iter().any(|&q| q < 0.0);
        if pos || neg {
            let (a, b) = offending_range(pts, |i| small(qf[i], i)).unwrap();
            return Err(Error::MixedType(format!(
                "curve is null on [{a}, {b}] and not null elsewhere"
            )));
        }
    }
    if qf.iter().any(|&q| q > 0.0) && qf.iter().any(|&q| q < 0.0) {
        return Err(Error::MixedType(
            "curve changes causal type (timelike and spacelike parts)".into(),
        ));
    }
    violation(pts, "V is not orthogonal to the curve", |i| !small(m[i], i))?;
    violation(pts, "⟨f₀', f₀'⟩ + ⟨V, V⟩ ≠ 0", |i| {
        balance[i].abs() > HYPOTHESIS_TOL
    })?;
    report.case = if qf[0] < 0.0 {
        CaseKind::CmcTimelike
    } else {
        report.notes.push(
            "spacelike branch: conformal roles of the coordinates are swapped".into(),
        );
        CaseKind::CmcSpacelike
    };
    Ok(report)
}

fn classify_psph(pts: &[CurvePoint]) -> Result<CaseReport> {
    let n = pts.len();
    let len = |v: [f64; 3]| dot_e(v, v).sqrt();
    violation(pts, "N₀ is not a unit vector", |i| {
        (len(pts[i].field) - 1.0).abs() > HYPOTHESIS_TOL
    })?;
    violation(pts, "N₀ is not orthogonal to the curve", |i| {
        dot_e(pts[i].d1, pts[i].field).abs() > HYPOTHESIS_TOL * len(pts[i].d1)
    })?;
    let g: Vec<f64> = pts.iter().map(|p| dot_e(p.d1, p.field_d1)).collect();
    let scale: Vec<f64> = pts
        .iter()
        .map(|p| dot_e(p.d1, p.d1) + dot_e(p.field_d1, p.field_d1))
        .collect();
    let zero = |i: usize| g[i].abs() <= HYPOTHESIS_TOL * scale[i];
    let zeros = (0..n).filter(|&i| zero(i)).count();
    let mut report = CaseReport {
        case: CaseKind::PsphAsymptotic,
        samples: n,
        speed_sqr: MinMax::of(&pts.iter().map(|p| dot_e(p.d1, p.d1)).collect::<Vec<_>>()),
        causal_balance: None,
        cross_term: MinMax::of(&g),
        parallel_discriminant: None,
        torsion_defect: None,
        normal_flipped: false,
        valid: true,
        notes: Vec::new(),
    };
    if zeros == n {
        let defect = pts
            .iter()
            .map(|p| {
                let s = len(p.d1);
                let e2 = cross_e(p.field, p.d1).map(|x| x / s);
                let x = -dot_e(p.field_d1, e2);
                (x - s).abs() / s
            })
            .fold(0.0, f64::max);
        report.torsion_defect = Some(defect);
        if defect > 1e-6 {
            report.valid = false;
            report.notes.push(format!(
                "torsion condition fails (defect {defect:.3e}): the solution will not contain the curve"
            ));
        }
        return Ok(report);
    }
    if zeros > 0 {
        let (a, b) = offending_range(pts, zero).unwrap();
        return Err(Error::hypothesis(
            "⟨f₀', N₀'⟩ vanishes on part of the curve (mixed characteristic type)",
            a,
            b,
        ));
    }
    if g.iter().any(|&x| x > 0.0) && g.iter().any(|&x| x < 0.0) {
        return Err(Error::MixedType("⟨f₀', N₀'⟩ changes sign".into()));
    }
    if g[0] < 0.0 {
        report.normal_flipped = true;
        report.cross_term = MinMax::of(&g.iter().map(|x| -x).collect::<Vec<_>>());
        report.notes.push("N₀ replaced by −N₀".into());
    }
    let disc: Vec<f64> = pts
        .iter()
        .zip(&g)
        .map(|(p, gi)| {
            let a = dot_e(p.d1, p.d1) * dot_e(p.field_d1, p.field_d1);
            ((a - gi * gi) / a).max(0.0)
        })
        .collect();
    let parallel = |i: usize| disc[i] < HYPOTHESIS_TOL;
    let np = (0..n).filter(|&i| parallel(i)).count();
    report.parallel_discriminant = Some(MinMax::of(&disc));
    report.case = if np == n {
        CaseKind::PsphPrincipal
    } else if np == 0 {
        CaseKind::PsphGeneral
    } else {
        let (a, b) = offending_range(pts, parallel).unwrap();
        return Err(Error::hypothesis(
            "N₀' is parallel to f₀' on part of the curve only",
            a,
            b,
        ));
    };
    Ok(report)
}
