//! Finite-difference checks on surface meshes.

use serde::{Deserialize, Serialize};

use crate::cauchydata::{CauchyPotential, CurveData, CurveMap, Placement};
use crate::error::Result;
use crate::framegen::{integrate_potential, FrameOptions, PsphGauge, SurfaceKind};
use crate::loopcore::CircleGrid;
use crate::mat2::{re, Mat2};
use crate::minkalg::{AmbientVector, Vec3E, Vec3L};

use super::SurfaceMesh;

/// One named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    /// Nodes (or curve points) that entered the statistics.
    pub count: usize,
    /// Nodes left out on purpose (masked stencils, singular points).
    pub excluded: usize,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn from_values(name: &str, values: &[f64], excluded: usize, tolerance: f64) -> Self {
        let max = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mean = if values.is_empty() {
            0.0
        } else {
            values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64
        };
        let finite = values.iter().all(|v| v.is_finite());
        CheckResult {
            name: name.to_string(),
            max,
            mean,
            count: values.len(),
            excluded,
            tolerance,
            pass: finite && !values.is_empty() && max <= tolerance,
            rate: None,
            note: if values.is_empty() {
                Some("no admissible nodes".into())
            } else {
                None
            },
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// All checks of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub checks: Vec<CheckResult>,
}

impl DiagnosticsReport {
    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = CheckResult>) {
        self.checks.extend(cs);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

/// Per-node curvature estimates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureField {
    pub values: Vec<Option<f64>>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn enorm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Second-order central derivatives `(f_x, f_y, f_xx, f_xy, f_yy)` at an
/// interior node whose 3×3 neighbourhood is unmasked.
fn second_order_jet(mesh: &SurfaceMesh, i: usize, j: usize) -> Option<[[f64; 3]; 5]> {
    let (hx, hy) = (mesh.grid.hx(), mesh.grid.hy());
    let mut p = [[[0.0; 3]; 3]; 3];
    for (a, row) in p.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let idx = mesh.valid(i as isize + a as isize - 1, j as isize + b as isize - 1)?;
            *v = mesh.positions[idx];
        }
    }
    let fx = scale(sub(p[2][1], p[0][1]), 0.5 / hx);
    let fy = scale(sub(p[1][2], p[1][0]), 0.5 / hy);
    let fxx = scale(add(sub(p[2][1], scale(p[1][1], 2.0)), p[0][1]), 1.0 / (hx * hx));
    let fyy = scale(add(sub(p[1][2], scale(p[1][1], 2.0)), p[1][0]), 1.0 / (hy * hy));
    let fxy = scale(
        sub(sub(p[2][2], p[2][0]), sub(p[0][2], p[0][0])),
        0.25 / (hx * hy),
    );
    Some([fx, fy, fxx, fxy, fyy])
}

/// Fourth-order derivative of node data along the grid direction `(di, dj)`
/// with spacing `h`, centred at `(i, j)`.
fn directional_derivative(
    mesh: &SurfaceMesh,
    data: &[[f64; 3]],
    i: usize,
    j: usize,
    (di, dj): (isize, isize),
    h: f64,
) -> Option<[f64; 3]> {
    const W: [(isize, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
    let mut out = [0.0; 3];
    for (k, w) in W {
        let idx = mesh.valid(i as isize + k * di, j as isize + k * dj)?;
        for c in 0..3 {
            out[c] += w * data[idx][c];
        }
    }
    Some(scale(out, 1.0 / (12.0 * h)))
}

/// `H = ⟨f_xy, N⟩ / ⟨f_x, f_y⟩` at interior nodes, compared with the target.
pub fn mean_curvature(mesh: &SurfaceMesh, tolerance: f64) -> (CurvatureField, CheckResult) {
    let g = mesh.grid;
    let mut values = vec![None; g.len()];
    let mut errs = Vec::new();
    let mut excluded = 0;
    for idx in 0..g.len() {
        let (i, j) = g.coords(idx);
        if !mesh.mask[idx] {
            continue;
        }
        let Some([fx, fy, _, fxy, _]) = second_order_jet(mesh, i, j) else {
            excluded += 1;
            continue;
        };
        let h = mesh.ip(fxy, mesh.normals[idx]) / mesh.ip(fx, fy);
        values[idx] = Some(h);
        errs.push(h - mesh.meta.target_curvature);
    }
    let check = CheckResult::from_values("mean_curvature", &errs, excluded, tolerance);
    (CurvatureField { values }, check)
}

/// `K = (LN − M²)/(EG − F²)` at interior nodes, compared with −1. Nodes
/// where the coordinate lines are nearly tangent (`sin φ < 1e−6`) are
/// excluded and counted.
pub fn gauss_curvature(mesh: &SurfaceMesh, tolerance: f64) -> (CurvatureField, CheckResult) {
    let g = mesh.grid;
    let mut values = vec![None; g.len()];
    let mut errs = Vec::new();
    let mut excluded = 0;
    let mut singular = 0;
    for idx in 0..g.len() {
        let (i, j) = g.coords(idx);
        if !mesh.mask[idx] {
            continue;
        }
        let Some([fx, fy, fxx, fxy, fyy]) = second_order_jet(mesh, i, j) else {
            excluded += 1;
            continue;
        };
        let n = mesh.normals[idx];
        let (e, f, gg) = (mesh.ip(fx, fx), mesh.ip(fx, fy), mesh.ip(fy, fy));
        let sin_phi = enorm(mesh.cross(fx, fy)) / (e.abs().sqrt() * gg.abs().sqrt());
        if !(sin_phi >= 1e-6) {
            singular += 1;
            continue;
        }
        let (l, m, nn) = (mesh.ip(fxx, n), mesh.ip(fxy, n), mesh.ip(fyy, n));
        let k = (l * nn - m * m) / (e * gg - f * f);
        values[idx] = Some(k);
        errs.push(k - mesh.meta.target_curvature);
    }
    let mut check =
        CheckResult::from_values("gauss_curvature", &errs, excluded + singular, tolerance);
    if singular > 0 {
        check = check.with_note(format!("{singular} near-singular nodes (sin φ < 1e-6)"));
    }
    (CurvatureField { values }, check)
}

/// Sym normals against normalized cross products of central differences.
pub fn normal_consistency(mesh: &SurfaceMesh, tolerance: f64) -> CheckResult {
    let g = mesh.grid;
    let mut errs = Vec::new();
    let mut excluded = 0;
    for idx in 0..g.len() {
        let (i, j) = g.coords(idx);
        if !mesh.mask[idx] {
            continue;
        }
        let Some([fx, fy, ..]) = second_order_jet(mesh, i, j) else {
            excluded += 1;
            continue;
        };
        let c = mesh.cross(fx, fy);
        let len = mesh.ip(c, c).abs().sqrt();
        if !(len > 0.0) {
            excluded += 1;
            continue;
        }
        let n = mesh.normals[idx];
        // orientation is a convention; compare up to sign
        let d = enorm(sub(scale(c, 1.0 / len), n)).min(enorm(add(scale(c, 1.0 / len), n)));
        errs.push(d);
    }
    CheckResult::from_values("normal_consistency", &errs, excluded, tolerance)
}

/// Grid nodes on the initial curve, as `(i, j, t)`.
fn curve_nodes(mesh: &SurfaceMesh, map: CurveMap, domain: (f64, f64)) -> Vec<(usize, usize, f64)> {
    let (xs, ys) = (mesh.grid.xs(), mesh.grid.ys());
    let tol = 1e-9 * (1.0 + domain.0.abs().max(domain.1.abs()));
    let mut out = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        if x < domain.0 - tol || x > domain.1 + tol {
            continue;
        }
        let (_, y) = map.point(x);
        if let Some(j) = ys.iter().position(|&yj| (yj - y).abs() <= tol) {
            out.push((i, j, x));
        }
    }
    out
}

fn placed_l(p: &Option<Placement>, v: Vec3L, vector: bool) -> [f64; 3] {
    match p {
        Some(Placement::Lorentz(iso)) if vector => iso.apply_vector(v).coords(),
        Some(Placement::Lorentz(iso)) => iso.apply(v).coords(),
        _ => v.coords(),
    }
}

fn placed_e(p: &Option<Placement>, v: Vec3E, vector: bool) -> [f64; 3] {
    match p {
        Some(Placement::Euclid(iso)) if vector => iso.apply_vector(v).coords(),
        Some(Placement::Euclid(iso)) => iso.apply(v).coords(),
        _ => v.coords(),
    }
}

/// Surface along the line `x = x_base` from `F̂₋` alone: there `F̂₊ = I` and
/// `F̂₋` is already a normalized minus loop, so no splitting is needed.
fn second_curve(
    mesh: &SurfaceMesh,
    pot: &CauchyPotential,
    opts: &FrameOptions,
) -> Result<Vec<[f64; 3]>> {
    let ys = mesh.grid.ys();
    let circle = CircleGrid::new(opts.samples);
    let h = opts.steps.step(mesh.grid.y_range.1 - mesh.grid.y_range.0, mesh.grid.ny);
    let loops = integrate_potential(
        &*pot.pair.psi,
        &circle,
        pot.pair.form(),
        pot.pair.y_base,
        &ys,
        h,
    )?;
    let lam = re(mesh.meta.lambda0);
    let placement = mesh.meta.placement;
    Ok(loops
        .iter()
        .map(|l| {
            let (f, d) = l.to_laurent(opts.store_tol).eval_with_derivative(lam);
            let inv = f.inverse();
            match pot.kind() {
                SurfaceKind::Cmc => {
                    let e2 = Vec3L::basis(2).to_matrix();
                    let s: Mat2 = d * inv * 2.0 - f * e2 * inv + e2;
                    let h = pot.mean_curvature.unwrap_or(1.0);
                    placed_l(&placement, Vec3L::from_matrix(&s) * (0.5 / h), false)
                }
                SurfaceKind::Psph => placed_e(&placement, Vec3E::from_matrix(&(d * inv)), false),
            }
        })
        .collect())
}

/// Boundary residuals: position (and normal or transverse derivative) along
/// the initial curve; for characteristic data also the second prescribed
/// curve `x = x_base`.
pub fn cauchy_residual(
    mesh: &SurfaceMesh,
    pot: &CauchyPotential,
    data: &CurveData,
    opts: &FrameOptions,
    tolerance: f64,
) -> Result<Vec<CheckResult>> {
    let map = pot.curve_map;
    let nodes = curve_nodes(mesh, map, data.domain);
    let (hx, hy) = (mesh.grid.hx(), mesh.grid.hy());
    let mut pos = Vec::new();
    let mut trans = Vec::new();
    let mut normal = Vec::new();
    let mut speed = Vec::new();
    let mut excluded = 0;
    let sign = if pot.report.normal_flipped { -1.0 } else { 1.0 };
    for &(i, j, t) in &nodes {
        let Some(idx) = mesh.valid(i as isize, j as isize) else {
            excluded += 1;
            continue;
        };
        let p = data.point(t);
        pos.push(enorm(sub(mesh.positions[idx], p.pos)));
        match (pot.kind(), map) {
            (SurfaceKind::Cmc, CurveMap::Antidiagonal | CurveMap::Diagonal) => {
                // diagonal steps move x and y together; the grid must be square
                let dj = if map == CurveMap::Antidiagonal { 1 } else { -1 };
                if (hx - hy).abs() <= 1e-12 * hx {
                    if let Some(d) =
                        directional_derivative(mesh, &mesh.positions, i, j, (1, dj), hx)
                    {
                        trans.push(enorm(sub(d, p.field)));
                    }
                }
            }
            (SurfaceKind::Cmc, CurveMap::XAxis) => {
                if let (Some(d), Some(k)) = (
                    directional_derivative(mesh, &mesh.positions, i, j, (0, 1), hy),
                    pot.null_scale.as_ref(),
                ) {
                    trans.push(enorm(sub(d, scale(p.field, k(t)))));
                }
            }
            (SurfaceKind::Psph, _) => {
                normal.push(enorm(sub(mesh.normals[idx], scale(p.field, sign))));
                if map == CurveMap::XAxis {
                    if let Some(d) =
                        directional_derivative(mesh, &mesh.positions, i, j, (0, 1), hy)
                    {
                        let a = (pot.pair.psi)(0.0).m1.get(0, 1).norm();
                        speed.push(enorm(d) - 2.0 * a);
                    }
                }
            }
        }
    }
    let mut out = vec![CheckResult::from_values(
        "cauchy.position",
        &pos,
        excluded,
        tolerance,
    )];
    if pot.kind() == SurfaceKind::Cmc {
        let mut c = CheckResult::from_values("cauchy.transverse", &trans, excluded, tolerance);
        if map == CurveMap::XAxis {
            c = c.with_note("f_y compared with k(t)V(t)");
        }
        out.push(c);
    } else {
        out.push(CheckResult::from_values("cauchy.normal", &normal, excluded, tolerance));
        if map == CurveMap::XAxis {
            out.push(CheckResult::from_values(
                "cauchy.asymptotic_speed",
                &speed,
                excluded,
                tolerance,
            ));
        }
    }
    if map == CurveMap::XAxis {
        let xs = mesh.grid.xs();
        let col = xs
            .iter()
            .position(|&x| (x - pot.pair.x_base).abs() <= 1e-9 * (1.0 + x.abs()));
        match col {
            Some(i) => {
                let reference = second_curve(mesh, pot, opts)?;
                let mut errs = Vec::new();
                let mut skipped = 0;
                for (j, r) in reference.iter().enumerate() {
                    match mesh.valid(i as isize, j as isize) {
                        Some(idx) => errs.push(enorm(sub(mesh.positions[idx], *r))),
                        None => skipped += 1,
                    }
                }
                out.push(CheckResult::from_values(
                    "cauchy.second_curve",
                    &errs,
                    skipped,
                    tolerance,
                ));
            }
            None => out.push(
                CheckResult::from_values("cauchy.second_curve", &[], 0, tolerance)
                    .with_note("x_base is not a grid column"),
            ),
        }
    }
    Ok(out)
}

/// Geodesic curvature of the initial curve in the mesh: the component of
/// `f₀''` along `N × T` (tangent plane from 4th-order differences),
/// relative to `‖f₀''‖`.
pub fn geodesic_residual(
    mesh: &SurfaceMesh,
    map: CurveMap,
    data: &CurveData,
    tolerance: f64,
) -> CheckResult {
    let (hx, hy) = (mesh.grid.hx(), mesh.grid.hy());
    let mut errs = Vec::new();
    let mut excluded = 0;
    for (i, j, t) in curve_nodes(mesh, map, data.domain) {
        let (Some(fx), Some(fy)) = (
            directional_derivative(mesh, &mesh.positions, i, j, (1, 0), hx),
            directional_derivative(mesh, &mesh.positions, i, j, (0, 1), hy),
        ) else {
            excluded += 1;
            continue;
        };
        let n = mesh.cross(fx, fy);
        let n = scale(n, 1.0 / enorm(n));
        let p = data.point(t);
        let tan = scale(p.d1, 1.0 / enorm(p.d1));
        let side = mesh.cross(n, tan);
        errs.push(mesh.ip(p.d2, side) / enorm(p.d2));
    }
    CheckResult::from_values("geodesic", &errs, excluded, tolerance)
}

/// Per-node data of a gauged K-surface frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SineGordonData {
    pub grid: crate::framegen::GridSpec,
    pub nodes: Vec<Option<PsphGauge>>,
}

fn wrap(a: f64) -> f64 {
    use std::f64::consts::PI;
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Residual of `φ_xy − |f_x||f_y| sin φ` (central differences, `φ = 2θ`
/// differenced modulo 2π) and the Codazzi checks `∂_y|f_x| = ∂_x|f_y| = 0`.
pub fn sine_gordon_residual(
    data: &SineGordonData,
    tolerance: f64,
    codazzi_tolerance: f64,
) -> (CheckResult, CheckResult) {
    let g = data.grid;
    let (hx, hy) = (g.hx(), g.hy());
    let get = |i: isize, j: isize| -> Option<&PsphGauge> {
        if i < 0 || j < 0 || i >= g.nx as isize || j >= g.ny as isize {
            return None;
        }
        data.nodes[g.index(i as usize, j as usize)].as_ref()
    };
    let mut res = Vec::new();
    let mut cod = Vec::new();
    let mut excluded = 0;
    let mut singular = 0;
    for idx in 0..g.len() {
        let (i, j) = g.coords(idx);
        let (i, j) = (i as isize, j as isize);
        let Some(c) = get(i, j) else { continue };
        let nb = (
            get(i + 1, j + 1),
            get(i + 1, j - 1),
            get(i - 1, j + 1),
            get(i - 1, j - 1),
            get(i + 1, j),
            get(i - 1, j),
            get(i, j + 1),
            get(i, j - 1),
        );
        let (Some(pp), Some(pm), Some(mp), Some(mm), Some(e), Some(w), Some(n), Some(s)) = nb
        else {
            excluded += 1;
            continue;
        };
        cod.push((n.fx_len - s.fx_len) / (2.0 * hy));
        cod.push((e.fy_len - w.fy_len) / (2.0 * hx));
        if !c.regular {
            singular += 1;
            continue;
        }
        let phi = |q: &PsphGauge| 2.0 * q.theta;
        let phi_xy =
            (wrap(phi(pp) - phi(pm)) - wrap(phi(mp) - phi(mm))) / (4.0 * hx * hy);
        res.push(phi_xy - c.fx_len * c.fy_len * phi(c).sin());
    }
    let mut r = CheckResult::from_values("sine_gordon", &res, excluded + singular, tolerance);
    if singular > 0 {
        r = r.with_note(format!("{singular} non-regular nodes (sin φ < 1e-6)"));
    }
    let c = CheckResult::from_values("codazzi", &cod, excluded, codazzi_tolerance);
    (r, c)
}
