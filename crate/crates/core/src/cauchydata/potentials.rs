//! Boundary potential pairs for every case of the Cauchy problem.
//!
//! The data is first moved by a rigid motion so that the adapted frame at the
//! base parameter `t₀` is the model frame and `f₀(t₀)` is the origin; the
//! surface computed from the pair is then placed back by [`Isometry`]. The
//! potentials themselves depend only on invariants of the data (speeds, the
//! frame connection and second derivatives), so the pre-isometry never has to
//! be applied explicitly.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framegen::{CoeffFn, LaurentTriple, PotentialPair, SurfaceKind};
use crate::mat2::{c, re, Mat2, C64, ZERO};
use crate::minkalg::{frame_connection, AmbientVector, Frame3, Vec3E, Vec3L};

use super::classify::{classify, CaseKind, CaseReport};
use super::curve::{CurveData, CurvePoint};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Rigid motion `v ↦ Σ vᵢ Eᵢ + p` taking model coordinates to user
/// coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry<V> {
    pub columns: [V; 3],
    pub translation: V,
}

impl<V: AmbientVector> Isometry<V> {
    pub fn identity() -> Self {
        Isometry {
            columns: [V::basis(0), V::basis(1), V::basis(2)],
            translation: V::zero(),
        }
    }

    pub fn apply_vector(&self, v: V) -> V {
        let c = v.coords();
        self.columns[0] * c[0] + self.columns[1] * c[1] + self.columns[2] * c[2]
    }

    pub fn apply(&self, v: V) -> V {
        self.apply_vector(v) + self.translation
    }
}

/// Placement of the model surface in the user's coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ambient", rename_all = "lowercase")]
pub enum Placement {
    Lorentz(Isometry<Vec3L>),
    Euclid(Isometry<Vec3E>),
}

/// Where the curve parameter `t` sits in the `(x, y)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveMap {
    /// `(t, −t)`; transverse direction `∂_x + ∂_y`.
    Antidiagonal,
    /// `(t, t)`; transverse direction `∂_x − ∂_y`.
    Diagonal,
    /// `(t, 0)`; the second prescribed direction is `x = x_base`.
    XAxis,
}

impl CurveMap {
    pub fn point(self, t: f64) -> (f64, f64) {
        match self {
            CurveMap::Antidiagonal => (t, -t),
            CurveMap::Diagonal => (t, t),
            CurveMap::XAxis => (t, 0.0),
        }
    }

    /// Coefficients `(a, b)` of the transverse derivative `a∂_x + b∂_y`.
    pub fn transverse(self) -> (f64, f64) {
        match self {
            CurveMap::Antidiagonal => (1.0, 1.0),
            CurveMap::Diagonal => (1.0, -1.0),
            CurveMap::XAxis => (0.0, 1.0),
        }
    }
}

/// A potential pair together with everything needed to compare its surface
/// with the data.
#[derive(Clone)]
pub struct CauchyPotential {
    pub pair: PotentialPair,
    pub report: CaseReport,
    pub curve_map: CurveMap,
    pub t0: f64,
    /// Mean curvature (CMC cases).
    pub mean_curvature: Option<f64>,
    pub placement: Placement,
    /// Null case: `f_y(t, 0) = k(t) V(t)`.
    pub null_scale: Option<ScalarFn>,
    pub notes: Vec<String>,
}

impl fmt::Debug for CauchyPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchyPotential")
            .field("case", &self.report.case)
            .field("curve_map", &self.curve_map)
            .field("t0", &self.t0)
            .field("mean_curvature", &self.mean_curvature)
            .field("placement", &self.placement)
            .finish()
    }
}

impl CauchyPotential {
    pub fn case(&self) -> CaseKind {
        self.report.case
    }

    pub fn kind(&self) -> SurfaceKind {
        self.pair.kind
    }
}

// ---- frames along the curve --------------------------------------------

fn lv(a: [f64; 3]) -> Vec3L {
    Vec3L::from_coords(a)
}

fn ev(a: [f64; 3]) -> Vec3E {
    Vec3E::from_coords(a)
}

/// `(w/s, (w/s)')` from `w, w', s, s'`.
fn unit_with_derivative<V: AmbientVector>(w: V, dw: V, s: f64, ds: f64) -> (V, V) {
    (w * (1.0 / s), dw * (1.0 / s) - w * (ds / (s * s)))
}

/// The adapted CMC frame `(E₀, E₁, E₂)`, its derivative, and the conformal
/// speed `s = e^{ω/2}` along the curve.
pub fn cmc_frame(p: &CurvePoint, case: CaseKind) -> Result<(Frame3<Vec3L>, Frame3<Vec3L>, f64)> {
    let (f1, f2, v, v1) = (lv(p.d1), lv(p.d2), lv(p.field), lv(p.field_d1));
    let (e0, e1, s) = match case {
        CaseKind::CmcTimelike => {
            let s = v.ip(&v).sqrt();
            let ds = v.ip(&v1) / s;
            (
                unit_with_derivative(f1, f2, s, ds),
                unit_with_derivative(v, v1, s, ds),
                s,
            )
        }
        CaseKind::CmcSpacelike => {
            let s = f1.ip(&f1).sqrt();
            let ds = f1.ip(&f2) / s;
            (
                unit_with_derivative(v, v1, s, ds),
                unit_with_derivative(f1, f2, s, ds),
                s,
            )
        }
        CaseKind::CmcNull => {
            let m = f1.ip(&v);
            let s = (2.0 * m).sqrt();
            let ds = (f2.ip(&v) + f1.ip(&v1)) / s;
            (
                unit_with_derivative(f1 - v, f2 - v1, s, ds),
                unit_with_derivative(f1 + v, f2 + v1, s, ds),
                s,
            )
        }
        other => {
            return Err(Error::Curve(format!(
                "{} data has no CMC frame",
                other.name()
            )))
        }
    };
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::hypothesis("conformal factor vanishes", p.t, p.t));
    }
    let e2 = e0.0.cross(&e1.0);
    let de2 = e0.1.cross(&e1.0) + e0.0.cross(&e1.1);
    Ok(([e0.0, e1.0, e2], [e0.1, e1.1, de2], s))
}

/// `F₀⁻¹F₀'` entries `(a, b, c)` with `F₀⁻¹F₀' = [[a, b], [c, −a]]`.
fn sl2_entries(x: Vec3L) -> (f64, f64, f64) {
    let m = x.to_matrix();
    (m.get(0, 0).re, m.get(0, 1).re, m.get(1, 0).re)
}

fn placement_l(frame: &Frame3<Vec3L>, origin: [f64; 3]) -> Placement {
    Placement::Lorentz(Isometry {
        columns: *frame,
        translation: lv(origin),
    })
}

fn placement_e(frame: &Frame3<Vec3E>, origin: [f64; 3]) -> Placement {
    Placement::Euclid(Isometry {
        columns: *frame,
        translation: ev(origin),
    })
}

fn require_case(report: &CaseReport, allowed: &[CaseKind], what: &str) -> Result<()> {
    if allowed.contains(&report.case) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what} needs {} data, got {}",
            allowed
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join(" or "),
            report.case.name()
        )))
    }
}

// ---- CMC ---------------------------------------------------------------

/// Loop-algebra valued `Â(t)` of a non-characteristic CMC curve.
pub fn cmc_loop_potential(p: &CurvePoint, case: CaseKind, h: f64) -> Result<LaurentTriple> {
    let (frame, dframe, s) = cmc_frame(p, case)?;
    let (a, b, cc) = sl2_entries(frame_connection(&frame, &dframe));
    let hh = 0.5 * h * s;
    let (p1, m1) = match case {
        CaseKind::CmcTimelike => (
            Mat2::real(0.0, b - hh, hh, 0.0),
            Mat2::real(0.0, hh, cc - hh, 0.0),
        ),
        CaseKind::CmcSpacelike => (
            Mat2::real(0.0, b + hh, hh, 0.0),
            Mat2::real(0.0, -hh, cc - hh, 0.0),
        ),
        _ => return Err(Error::Curve("null data is characteristic".into())),
    };
    Ok(LaurentTriple::new(m1, Mat2::real(a, 0.0, 0.0, -a), p1))
}

/// `t ↦ −A(−t)`.
fn reflected(a: CoeffFn) -> CoeffFn {
    Arc::new(move |y| a(-y).scale(-1.0))
}

/// Potential pair of timelike or spacelike CMC data with mean curvature `h`.
pub fn potential_cmc_noncharacteristic(data: &CurveData, h: f64) -> Result<CauchyPotential> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::Config(format!("mean curvature must be nonzero, got {h}")));
    }
    let report = classify(data)?;
    require_case(
        &report,
        &[CaseKind::CmcTimelike, CaseKind::CmcSpacelike],
        "the non-characteristic CMC solver",
    )?;
    let case = report.case;
    let t0 = data.t0;
    let p0 = data.point(t0);
    let (frame0, _, _) = cmc_frame(&p0, case)?;
    let eval = data.evaluator();
    let a: CoeffFn = Arc::new(move |t| {
        cmc_loop_potential(&eval(t), case, h).expect("validated curve data")
    });
    let (pair, map) = match case {
        CaseKind::CmcTimelike => (
            PotentialPair::new(a.clone(), reflected(a), SurfaceKind::Cmc).with_base(t0, -t0),
            CurveMap::Antidiagonal,
        ),
        _ => (
            PotentialPair::new(a.clone(), a, SurfaceKind::Cmc).with_base(t0, t0),
            CurveMap::Diagonal,
        ),
    };
    let mut notes = report.notes.clone();
    if case == CaseKind::CmcSpacelike {
        notes.push("spacelike branch: pair (Â(x)dx, Â(y)dy), curve on x = y".into());
    }
    Ok(CauchyPotential {
        pair,
        report,
        curve_map: map,
        t0,
        mean_curvature: Some(h),
        placement: placement_l(&frame0, p0.pos),
        null_scale: None,
        notes,
    })
}

/// Constant pair of the timelike-axis surfaces of revolution.
pub fn potential_revolution_timelike(rho: f64, h: f64) -> Result<PotentialPair> {
    if !(rho > 0.0) || h == 0.0 || !h.is_finite() {
        return Err(Error::Config(format!(
            "need ρ > 0 and H ≠ 0 (ρ = {rho}, H = {h})"
        )));
    }
    let g = 1.0 + rho * h;
    let a = LaurentTriple::new(
        Mat2::real(0.0, -0.5 * h * rho, -0.5 * g, 0.0),
        Mat2::ZERO,
        Mat2::real(0.0, 0.5 * g, 0.5 * h * rho, 0.0),
    );
    Ok(PotentialPair::constant(a, a, SurfaceKind::Cmc))
}

/// Mean curvature forced by null data, `H = 2c/s`, where `c` is the lower
/// entry of the frame connection.
fn null_mean_curvature(p: &CurvePoint) -> Result<(f64, Vec3L, f64)> {
    let (frame, dframe, s) = cmc_frame(p, CaseKind::CmcNull)?;
    let x = frame_connection(&frame, &dframe);
    let (_, _, cc) = sl2_entries(x);
    Ok((2.0 * cc / s, x, s))
}

/// Composite Simpson rule on `[a, b]`.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(2) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Potential pair of null CMC data. `alpha(0)` must not vanish; `h`, when
/// given, must match the mean curvature forced by the data.
pub fn potential_cmc_null(
    data: &CurveData,
    alpha: ScalarFn,
    beta: ScalarFn,
    h: Option<f64>,
) -> Result<CauchyPotential> {
    let report = classify(data)?;
    require_case(&report, &[CaseKind::CmcNull], "the null CMC solver")?;
    let a0 = alpha(0.0);
    if !(a0.abs() > 1e-12) || !a0.is_finite() {
        return Err(Error::hypothesis("α(0) must not vanish", 0.0, 0.0));
    }
    let t0 = data.t0;
    let (forced, _, _) = null_mean_curvature(&data.point(t0))?;
    let mut worst: f64 = 0.0;
    for p in data.samples(201) {
        let (hp, _, _) = null_mean_curvature(&p)?;
        worst = worst.max((hp - forced).abs());
    }
    if worst > 1e-8 * (1.0 + forced.abs()) || forced.abs() < 1e-12 {
        return Err(Error::hypothesis(
            format!("null data forces non-constant or zero mean curvature (H(t₀) = {forced}, spread {worst:.3e})"),
            data.domain.0,
            data.domain.1,
        ));
    }
    if let Some(hu) = h {
        if (hu - forced).abs() > 1e-8 * (1.0 + forced.abs()) {
            return Err(Error::hypothesis(
                format!("requested H = {hu} but the null data forces H = {forced}"),
                data.domain.0,
                data.domain.1,
            ));
        }
    }
    let eval = data.evaluator();
    let chi: CoeffFn = Arc::new(move |t| {
        let (_, x, _) = null_mean_curvature(&eval(t)).expect("validated curve data");
        let c = x.coords();
        let p1 = Vec3L::new(c[0], c[1], 0.0).to_matrix();
        let z0 = Vec3L::new(0.0, 0.0, c[2]).to_matrix();
        LaurentTriple::new(Mat2::ZERO, z0, p1)
    });
    let psi: CoeffFn = Arc::new(move |y| {
        LaurentTriple::new(Mat2::real(0.0, alpha(y), beta(y), 0.0), Mat2::ZERO, Mat2::ZERO)
    });
    let p0 = data.point(t0);
    let (frame0, _, _) = cmc_frame(&p0, CaseKind::CmcNull)?;
    // f_y(t, 0) = −2α(0) e^{2∫X₂} / (s H) · V
    let eval = data.evaluator();
    let scale: ScalarFn = Arc::new(move |t| {
        let x2 = |u: f64| null_mean_curvature(&eval(u)).map(|r| r.1.x2).unwrap_or(f64::NAN);
        let n = ((t - t0).abs() * 64.0).ceil() as usize + 2;
        let int = simpson(x2, t0, t, n);
        let (_, _, s) = null_mean_curvature(&eval(t)).expect("validated curve data");
        -2.0 * a0 * (2.0 * int).exp() / (s * forced)
    });
    let mut notes = report.notes.clone();
    notes.push(format!(
        "transverse field reproduced up to the scale k(t₀) = {:.6}",
        scale(t0)
    ));
    Ok(CauchyPotential {
        pair: PotentialPair::new(chi, psi, SurfaceKind::Cmc).with_base(t0, 0.0),
        report,
        curve_map: CurveMap::XAxis,
        t0,
        mean_curvature: Some(forced),
        placement: placement_l(&frame0, p0.pos),
        null_scale: Some(scale),
        notes,
    })
}

// ---- K-surfaces ---------------------------------------------------------

/// Invariants of non-characteristic K-surface data at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsphInvariants {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub theta_v: f64,
}

fn psph_sign(report: &CaseReport) -> f64 {
    if report.normal_flipped {
        -1.0
    } else {
        1.0
    }
}

/// `(f', f'', N, N', N'')` in Euclidean vectors, with `N` multiplied by `sign`.
fn psph_vectors(p: &CurvePoint, sign: f64) -> [Vec3E; 5] {
    [
        ev(p.d1),
        ev(p.d2),
        ev(p.field) * sign,
        ev(p.field_d1) * sign,
        ev(p.field_d2) * sign,
    ]
}

/// `α, β, θ, θ_v` of non-characteristic data, and the adapted frame
/// `(E₁, E₂, N)`.
pub fn psph_invariants(
    p: &CurvePoint,
    case: CaseKind,
    sign: f64,
) -> Result<(PsphInvariants, Frame3<Vec3E>)> {
    let [f1, f2, n, n1, n2] = psph_vectors(p, sign);
    let (ff, nn, g) = (f1.ip(&f1), n1.ip(&n1), f1.ip(&n1));
    match case {
        CaseKind::PsphPrincipal => {
            let beta = (ff + nn).sqrt();
            let theta = ff.sqrt().atan2(nn.sqrt());
            let theta_v = f2.ip(&f1.cross(&n)) / ff;
            let e2 = f1 * (-1.0 / ff.sqrt());
            let e1 = e2.cross(&n);
            Ok((
                PsphInvariants {
                    alpha: 0.0,
                    beta,
                    theta,
                    theta_v,
                },
                [e1, e2, n],
            ))
        }
        CaseKind::PsphGeneral => {
            if g <= 0.0 {
                return Err(Error::hypothesis("⟨f₀', N₀'⟩ must be positive", p.t, p.t));
            }
            let z = (nn - ff) / (2.0 * g);
            let phi = 1.0_f64.atan2(z);
            let theta = 0.5 * phi;
            let root = (4.0 * g * g + (nn - ff).powi(2)).sqrt();
            let alpha = (0.5 * (ff + nn - root)).max(0.0).sqrt();
            let beta = (0.5 * (ff + nn + root)).sqrt();
            if alpha <= 0.0 {
                return Err(Error::hypothesis(
                    "f₀' and N₀' are parallel at a point of general data",
                    p.t,
                    p.t,
                ));
            }
            let dg = f2.ip(&n1) + f1.ip(&n2);
            let dz = ((n1.ip(&n2) - f1.ip(&f2)) * g - 0.5 * (nn - ff) * dg) / (g * g);
            let (st, ct) = theta.sin_cos();
            let y = st * ct * (f2.ip(&f1) - n1.ip(&n2)) + ct * ct * f1.ip(&n2)
                - st * st * n1.ip(&f2);
            let theta_v = alpha * dz / (2.0 * beta * (z * z + 1.0)) - y / (alpha * beta);
            let e1 = (f1 * ct - n1 * st) * (1.0 / alpha);
            let e2 = (f1 * st + n1 * ct) * (-1.0 / beta);
            Ok((
                PsphInvariants {
                    alpha,
                    beta,
                    theta,
                    theta_v,
                },
                [e1, e2, n],
            ))
        }
        other => Err(Error::Curve(format!(
            "{} data is not non-characteristic K-surface data",
            other.name()
        ))),
    }
}

/// `Â(t)` from the invariants.
pub fn psph_loop_potential(inv: &PsphInvariants) -> LaurentTriple {
    let i2 = c(0.0, 0.5);
    let e = C64::from_polar(1.0, inv.theta);
    let (pp, mm) = (0.5 * (inv.beta + inv.alpha), 0.5 * (inv.beta - inv.alpha));
    LaurentTriple::new(
        Mat2::new(ZERO, e * mm, e.conj() * mm, ZERO) * i2,
        Mat2::diag(re(-inv.theta_v), re(inv.theta_v)) * i2,
        Mat2::new(ZERO, e.conj() * pp, e * pp, ZERO) * i2,
    )
}

/// Potential pair of non-characteristic K-surface data (principal or
/// nowhere-principal curve). `N₀` is flipped when `⟨f₀', N₀'⟩ < 0`.
pub fn potential_psph_noncharacteristic(data: &CurveData) -> Result<CauchyPotential> {
    let report = classify(data)?;
    require_case(
        &report,
        &[CaseKind::PsphPrincipal, CaseKind::PsphGeneral],
        "the non-characteristic K-surface solver",
    )?;
    let case = report.case;
    let sign = psph_sign(&report);
    for p in data.samples(201) {
        psph_invariants(&p, case, sign)?;
    }
    let t0 = data.t0;
    let p0 = data.point(t0);
    let (_, frame0) = psph_invariants(&p0, case, sign)?;
    let eval = data.evaluator();
    let a: CoeffFn = Arc::new(move |t| {
        let (inv, _) = psph_invariants(&eval(t), case, sign).expect("validated curve data");
        psph_loop_potential(&inv)
    });
    Ok(CauchyPotential {
        pair: PotentialPair::new(a.clone(), reflected(a), SurfaceKind::Psph).with_base(t0, -t0),
        notes: report.notes.clone(),
        report,
        curve_map: CurveMap::Antidiagonal,
        t0,
        mean_curvature: None,
        placement: placement_e(&frame0, p0.pos),
        null_scale: None,
    })
}

/// Frame `(f'/|f'|, N×f'/|f'|, N)` of asymptotic data and its connection.
fn asymptotic_frame(p: &CurvePoint) -> (Frame3<Vec3E>, Vec3E) {
    let (f1, f2, n, n1) = (ev(p.d1), ev(p.d2), ev(p.field), ev(p.field_d1));
    let s = f1.norm();
    let ds = f1.ip(&f2) / s;
    let (e1, de1) = unit_with_derivative(f1, f2, s, ds);
    let e2 = n.cross(&e1);
    let de2 = n1.cross(&e1) + n.cross(&de1);
    let frame = [e1, e2, n];
    (frame, frame_connection(&frame, &[de1, de2, n1]))
}

/// Potential pair of asymptotic K-surface data with free function `alpha`.
pub fn potential_psph_characteristic(data: &CurveData, alpha: ComplexFn) -> Result<CauchyPotential> {
    let report = classify(data)?;
    require_case(
        &report,
        &[CaseKind::PsphAsymptotic],
        "the asymptotic K-surface solver",
    )?;
    for p in data.samples(201) {
        let (_, x) = asymptotic_frame(&p);
        if x.y.abs() > 1e-8 * (1.0 + x.norm()) {
            return Err(Error::hypothesis(
                "frame connection is not of asymptotic form",
                p.t,
                p.t,
            ));
        }
    }
    let a0 = alpha(0.0);
    if !(a0.norm() > 1e-12) {
        return Err(Error::hypothesis("α must not vanish", 0.0, 0.0));
    }
    let eval = data.evaluator();
    let chi: CoeffFn = Arc::new(move |t| {
        let (_, x) = asymptotic_frame(&eval(t));
        let (a, b) = (0.5 * x.z, 0.5 * x.x);
        LaurentTriple::new(
            Mat2::ZERO,
            Mat2::diag(c(0.0, a), c(0.0, -a)),
            Mat2::new(ZERO, c(0.0, b), c(0.0, b), ZERO),
        )
    });
    let psi: CoeffFn = Arc::new(move |y| {
        let a = alpha(y);
        LaurentTriple::new(Mat2::new(ZERO, a, -a.conj(), ZERO), Mat2::ZERO, Mat2::ZERO)
    });
    let t0 = data.t0;
    let p0 = data.point(t0);
    let (frame0, _) = asymptotic_frame(&p0);
    let mut notes = report.notes.clone();
    notes.push("ψ uses [[0, α], [−ᾱ, 0]]λ⁻¹ so that it lies in su(2)".into());
    Ok(CauchyPotential {
        pair: PotentialPair::new(chi, psi, SurfaceKind::Psph).with_base(t0, 0.0),
        report,
        curve_map: CurveMap::XAxis,
        t0,
        mean_curvature: None,
        placement: placement_e(&frame0, p0.pos),
        null_scale: None,
        notes,
    })
}

#[cfg(test)]
mod tests;
