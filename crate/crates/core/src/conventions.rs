//! Basis and sign conventions. Every identification of ambient vectors with
//! 2×2 matrices goes through these constants.
//!
//! Minkowski space 𝕃³ (signature −,+,+) is identified with sl(2,ℝ) via
//!
//! ```text
//! e0 = [[0,-1],[1,0]]   e1 = [[0,1],[1,0]]   e2 = [[-1,0],[0,1]]
//! ⟨X,Y⟩ = ½ tr(XY),     [X,Y] = 2 X×Y
//! ```
//!
//! Euclidean space 𝔼³ is identified with su(2) via
//!
//! ```text
//! e1 = ½[[0,i],[i,0]]   e2 = ½[[0,-1],[1,0]]   e3 = ½[[i,0],[0,-i]]
//! ⟨X,Y⟩ = -2 tr(XY),    [X,Y] = X×Y
//! ```
//!
//! The Euclidean basis is indexed 0,1,2 in code (e1 ↦ 0, e2 ↦ 1, e3 ↦ 2).

use crate::mat2::{c, Mat2, ZERO};

pub fn lorentz_basis() -> [Mat2; 3] {
    [
        Mat2::real(0.0, -1.0, 1.0, 0.0),
        Mat2::real(0.0, 1.0, 1.0, 0.0),
        Mat2::real(-1.0, 0.0, 0.0, 1.0),
    ]
}

pub fn euclid_basis() -> [Mat2; 3] {
    [
        Mat2::new(ZERO, c(0.0, 0.5), c(0.0, 0.5), ZERO),
        Mat2::new(ZERO, c(-0.5, 0.0), c(0.5, 0.0), ZERO),
        Mat2::new(c(0.0, 0.5), ZERO, ZERO, c(0.0, -0.5)),
    ]
}

/// Diagonal of the Minkowski metric in the basis (e0, e1, e2).
pub const LORENTZ_SIGNATURE: [f64; 3] = [-1.0, 1.0, 1.0];
pub const EUCLID_SIGNATURE: [f64; 3] = [1.0, 1.0, 1.0];

/// `[X, Y] = factor · X × Y` in each identification.
pub const LORENTZ_BRACKET: f64 = 2.0;
pub const EUCLID_BRACKET: f64 = 1.0;

/// Index of the basis vector used as surface normal in the model frame.
pub const NORMAL_INDEX: usize = 2;
