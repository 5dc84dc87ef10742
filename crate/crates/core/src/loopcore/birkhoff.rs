//! Normalized Birkhoff factorization by a finite-section block-Toeplitz solve.
//!
//! For `Φ = H₋H₊` with `H₋(∞) = I`, write `G = H₋⁻¹ = I + Σ_{i<0} g_i λ^i`.
//! `GΦ = H₊` has no negative coefficients, so truncating `G` at `λ^{-K}`:
//!
//! ```text
//! Σ_{i=-K}^{-1} g_i Φ_{j-i} = −Φ_j,    j = −1, ..., −K.
//! ```
//!
//! Transposed, this is a `2K × 2K` complex system solved by LU with partial
//! pivoting and one step of iterative refinement.

use nalgebra::DMatrix;

use super::TwistedLoop;
use crate::error::{Error, Result};
use crate::mat2::{Mat2, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirkhoffOptions {
    /// Number of negative coefficients solved for.
    pub truncation: usize,
    /// Condition number above which the loop counts as outside the big cell.
    pub max_condition: f64,
    pub max_residual: f64,
    /// Relative size of the last solved coefficients that triggers a retry
    /// at doubled truncation. A retry also happens when the product misses
    /// the loop by more than round-off.
    pub tail_tol: f64,
}

impl Default for BirkhoffOptions {
    fn default() -> Self {
        BirkhoffOptions {
            truncation: 16,
            max_condition: 1e12,
            max_residual: 1e-6,
            tail_tol: super::TAIL_TOL,
        }
    }
}

/// Factors of a Birkhoff splitting. For the left splitting `Φ = minus·plus`
/// with `minus(∞) = I`; for the right splitting `Φ = plus·minus` with
/// `plus(0) = I`.
#[derive(Clone, Debug)]
pub struct BirkhoffFactors {
    pub minus: TwistedLoop,
    pub plus: TwistedLoop,
    /// `max_k ‖Φ(λ_k) − product(λ_k)‖`.
    pub residual: f64,
    /// 1-norm condition number of the Toeplitz section.
    pub condition: f64,
    /// Truncation actually used (after a possible retry).
    pub truncation: usize,
}

fn big_cell(reason: impl Into<String>, condition: f64, residual: f64) -> Error {
    Error::BigCellFailure {
        reason: reason.into(),
        condition,
        residual,
    }
}

fn one_norm(a: &DMatrix<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solve for `g_{-1}, ..., g_{-K}`; returns them with the condition number.
fn solve_negative_part(phi: &TwistedLoop, k: usize) -> Result<(Vec<Mat2>, f64)> {
    let n = 2 * k;
    let mut a = DMatrix::from_element(n, n, ZERO);
    let mut b = DMatrix::from_element(n, 2, ZERO);
    for r in 0..k {
        for s in 0..k {
            let blk = phi.coeff(s as i32 - r as i32).transpose();
            for p in 0..2 {
                for q in 0..2 {
                    a[(2 * r + p, 2 * s + q)] = blk.0[p][q];
                }
            }
        }
        let rhs = phi.coeff(-1 - r as i32).transpose();
        for p in 0..2 {
            for q in 0..2 {
                b[(2 * r + p, q)] = -rhs.0[p][q];
            }
        }
    }
    let lu = a.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| big_cell("zero pivot in Toeplitz section", f64::INFINITY, f64::NAN))?;
    let condition = one_norm(&a) * one_norm(&inv);
    if !condition.is_finite() {
        return Err(big_cell("non-finite Toeplitz section", condition, f64::NAN));
    }
    let mut x = lu
        .solve(&b)
        .ok_or_else(|| big_cell("zero pivot in Toeplitz section", condition, f64::NAN))?;
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let g = (0..k)
        .map(|s| {
            // unknown block s is g_{-1-s}ᵀ
            Mat2::new(
                x[(2 * s, 0)],
                x[(2 * s + 1, 0)],
                x[(2 * s, 1)],
                x[(2 * s + 1, 1)],
            )
        })
        .collect();
    Ok((g, condition))
}

fn factor_with(phi: &TwistedLoop, k: usize) -> Result<(BirkhoffFactors, f64)> {
    let grid = phi.grid();
    let (g, condition) = solve_negative_part(phi, k)?;
    let gmax = g.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let tail = if gmax == 0.0 {
        0.0
    } else {
        g[k.saturating_sub(2)..]
            .iter()
            .map(|m| m.norm())
            .fold(0.0, f64::max)
            / gmax
    };

    let mut gs = Vec::with_capacity(grid.len());
    let mut prod = Vec::with_capacity(grid.len());
    for (kk, &lam) in grid.nodes().iter().enumerate() {
        let inv = lam.inv();
        let mut p = inv;
        let mut gk = Mat2::IDENTITY;
        for gi in &g {
            gk += *gi * p;
            p *= inv;
        }
        prod.push(gk * phi.samples()[kk]);
        gs.push(gk);
    }
    let gloop = TwistedLoop::from_samples(grid, gs, phi.twisted, phi.form);
    let hmax = grid.max_index();
    let plus = TwistedLoop::from_samples(grid, prod, phi.twisted, phi.form)
        .project(0, hmax)
        .normalize_det();
    let ginv = gloop.inv()?;
    let neg = ginv.project(-hmax - 1, -1);
    let minus_samples = neg.samples().iter().map(|m| *m + Mat2::IDENTITY).collect();
    let minus =
        TwistedLoop::from_samples(grid, minus_samples, phi.twisted, phi.form).normalize_det();

    let residual = phi
        .samples()
        .iter()
        .zip(minus.samples().iter().zip(plus.samples()))
        .map(|(f, (m, p))| (*f - *m * *p).norm())
        .fold(0.0, f64::max);
    Ok((
        BirkhoffFactors {
            minus,
            plus,
            residual,
            condition,
            truncation: k,
        },
        tail,
    ))
}

/// `Φ = H₋H₊` with `H₋(∞) = I`.
pub fn birkhoff_left(phi: &TwistedLoop, opts: &BirkhoffOptions) -> Result<BirkhoffFactors> {
    let cap = phi.grid().len() / 2;
    let mut k = opts.truncation.clamp(1, cap);
    let (mut f, tail) = factor_with(phi, k)?;
    let scale = phi.samples().iter().map(|m| m.norm()).fold(1.0, f64::max);
    if (tail > opts.tail_tol || f.residual > 1e-12 * scale) && 2 * k <= cap {
        k *= 2;
        f = factor_with(phi, k)?.0;
    }
    if f.condition > opts.max_condition {
        return Err(big_cell(
            "Toeplitz section ill-conditioned",
            f.condition,
            f.residual,
        ));
    }
    if !(f.residual <= opts.max_residual) {
        return Err(big_cell(
            "factor product does not reproduce the loop",
            f.condition,
            f.residual,
        ));
    }
    Ok(f)
}

/// `Φ = H₊H₋` with `H₊(0) = I`, by reflecting `λ → 1/λ`.
pub fn birkhoff_right(phi: &TwistedLoop, opts: &BirkhoffOptions) -> Result<BirkhoffFactors> {
    let f = birkhoff_left(&phi.reflect(), opts)?;
    Ok(BirkhoffFactors {
        minus: f.plus.reflect(),
        plus: f.minus.reflect(),
        residual: f.residual,
        condition: f.condition,
        truncation: f.truncation,
    })
}
