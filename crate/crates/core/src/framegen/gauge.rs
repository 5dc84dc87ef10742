//! Diagonal gauges bringing an admissible frame to coordinate-frame shape.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{maurer_cartan_coeffs, FrameField, SurfaceKind};
use crate::error::{Error, Result};
use crate::mat2::{c, re, Mat2};

/// Below this an off-diagonal coefficient counts as vanishing.
const REGULARITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmcGauge {
    pub rho: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// `ε e^ω = −4 c₁ b₂ / H²`.
    pub eps_e_omega: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsphGauge {
    pub mu: f64,
    pub fx_len: f64,
    pub fy_len: f64,
    /// `θ = φ/2`, with `φ ∈ [0, 2π)` the angle between the asymptotic lines.
    pub theta: f64,
    /// `sin φ` is not negligible.
    pub regular: bool,
}

/// `T = diag(ρ, ρ⁻¹)` with `ρ = |b₂/c₁|^{1/4}`, where `c₁ = [A₁]₂₁` and
/// `b₂ = [A₋₁]₁₂`. Nodes where either vanishes become `RegularityFailure`.
pub fn gauge_cmc(field: &FrameField, h: f64) -> Result<(FrameField, Vec<Option<CmcGauge>>)> {
    if field.kind != SurfaceKind::Cmc {
        return Err(Error::FormMismatch("CMC gauge on a K-surface frame".into()));
    }
    let mc = maurer_cartan_coeffs(field);
    let mut out = field.clone();
    let mut info = vec![None; mc.len()];
    for (idx, m) in mc.into_iter().enumerate() {
        let Some((a1, am1)) = m else { continue };
        let c1 = a1.get(1, 0).re;
        let b2 = am1.get(0, 1).re;
        if c1.abs() < REGULARITY_TOL || b2.abs() < REGULARITY_TOL {
            out.nodes[idx] = Err(Error::RegularityFailure(format!(
                "c1 = {c1:.3e}, b2 = {b2:.3e}"
            )));
            continue;
        }
        let rho = (b2 / c1).abs().powf(0.25);
        let t = Mat2::diag(re(rho), re(1.0 / rho));
        out.gauge[idx] = t;
        info[idx] = Some(CmcGauge {
            rho,
            eps1: c1.signum(),
            eps2: -b2.signum(),
            eps_e_omega: -4.0 * c1 * b2 / (h * h),
        });
    }
    Ok((out, info))
}

/// `T = diag(e^{iμ}, e^{−iμ})` with `μ` chosen so that
/// `[A₁]₁₂ = (i/2)|f_x|e^{−iθ}` and `[A₋₁]₁₂ = −(i/2)|f_y|e^{iθ}`.
pub fn gauge_psph(field: &FrameField) -> Result<(FrameField, Vec<Option<PsphGauge>>)> {
    if field.kind != SurfaceKind::Psph {
        return Err(Error::FormMismatch("K-surface gauge on a CMC frame".into()));
    }
    let mc = maurer_cartan_coeffs(field);
    let mut out = field.clone();
    let mut info = vec![None; mc.len()];
    for (idx, m) in mc.into_iter().enumerate() {
        let Some((a1, am1)) = m else { continue };
        let p1 = a1.get(0, 1);
        let pm1 = am1.get(0, 1);
        if p1.norm() < REGULARITY_TOL || pm1.norm() < REGULARITY_TOL {
            out.nodes[idx] = Err(Error::WeakRegularityFailure(format!(
                "|[A1]12| = {:.3e}, |[A-1]12| = {:.3e}",
                p1.norm(),
                pm1.norm()
            )));
            continue;
        }
        let phi = (PI - (p1.arg() - pm1.arg())).rem_euclid(2.0 * PI);
        let theta = 0.5 * phi;
        // e^{−2iμ} e^{i arg p₁} = e^{i(π/2 − θ)}
        let mu = 0.5 * (p1.arg() - 0.5 * PI + theta);
        let t = Mat2::diag(c(mu.cos(), mu.sin()), c(mu.cos(), -mu.sin()));
        out.gauge[idx] = t;
        info[idx] = Some(PsphGauge {
            mu,
            fx_len: 2.0 * p1.norm(),
            fy_len: 2.0 * pm1.norm(),
            theta,
            regular: phi.sin().abs() >= 1e-6,
        });
    }
    Ok((out, info))
}
