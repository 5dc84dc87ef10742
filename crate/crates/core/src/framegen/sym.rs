//! Sym formulas: surfaces from λ-derivatives of the frame.

use super::{FrameField, SurfaceKind};
use crate::error::{Error, Result};
use crate::mat2::{re, Mat2};
use crate::minkalg::{AmbientVector, Vec3E, Vec3L};
use crate::par::{map_range, Execution};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymNode<V> {
    pub pos: V,
    pub normal: V,
}

/// `(F, λ∂_λF)` at a node, gauge applied.
fn frame_and_derivative(field: &FrameField, idx: usize, lambda0: f64) -> Option<(Mat2, Mat2)> {
    let n = field.node(idx)?;
    let (f, d) = n.frame.eval_with_derivative(re(lambda0));
    let t = field.gauge[idx];
    Some((f * t, d * t))
}

fn cmc_s(f: &Mat2, d: &Mat2) -> Mat2 {
    let inv = f.inverse();
    let e2 = Vec3L::basis(2).to_matrix();
    *d * inv * 2.0 - *f * e2 * inv
}

/// `f = (1/2H)(𝒮(F̂(z)) − 𝒮(F̂(p)))` with `𝒮 = 2λ∂_λF̂F̂⁻¹ − Ad_F̂ e₂` at `λ₀`,
/// normal `Ad_F̂ e₂`. Without a base node, `p` is the point where `F̂ = I`.
pub fn sym_cmc(
    field: &FrameField,
    lambda0: f64,
    h: f64,
    base: Option<usize>,
    exec: Execution,
) -> Result<Vec<Option<SymNode<Vec3L>>>> {
    if field.kind != SurfaceKind::Cmc {
        return Err(Error::FormMismatch(
            "CMC Sym formula on a K-surface frame".into(),
        ));
    }
    if lambda0 == 0.0 || !lambda0.is_finite() || h == 0.0 || !h.is_finite() {
        return Err(Error::Config(format!(
            "need real λ₀ ≠ 0 and H ≠ 0 (λ₀ = {lambda0}, H = {h})"
        )));
    }
    let s0 = match base {
        Some(b) => {
            let (f, d) = frame_and_derivative(field, b, lambda0)
                .ok_or_else(|| Error::Numerical("Sym base point is masked".into()))?;
            cmc_s(&f, &d)
        }
        None => -Vec3L::basis(2).to_matrix(),
    };
    let scale = 0.5 / h;
    Ok(map_range(field.grid.len(), exec, |idx| {
        let (f, d) = frame_and_derivative(field, idx, lambda0)?;
        let pos = Vec3L::from_matrix(&(cmc_s(&f, &d) - s0)) * scale;
        let e2 = Vec3L::basis(2).to_matrix();
        let normal = Vec3L::from_matrix(&(f * e2 * f.inverse()));
        Some(SymNode { pos, normal })
    }))
}

/// `f = λ∂_λF̂ F̂⁻¹` at `λ₀`, normal `Ad_F̂ e₃`.
pub fn sym_psph(
    field: &FrameField,
    lambda0: f64,
    exec: Execution,
) -> Result<Vec<Option<SymNode<Vec3E>>>> {
    if field.kind != SurfaceKind::Psph {
        return Err(Error::FormMismatch(
            "K-surface Sym formula on a CMC frame".into(),
        ));
    }
    if lambda0 == 0.0 || !lambda0.is_finite() {
        return Err(Error::Config(format!("need real λ₀ ≠ 0, got {lambda0}")));
    }
    Ok(map_range(field.grid.len(), exec, |idx| {
        let (f, d) = frame_and_derivative(field, idx, lambda0)?;
        let inv = f.inverse();
        let pos = Vec3E::from_matrix(&(d * inv));
        let normal = Vec3E::from_matrix(&(f * Vec3E::basis(2).to_matrix() * inv));
        Some(SymNode { pos, normal })
    }))
}
