//! Complex 2×2 matrices, the scalar type of every loop in the crate.

use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Row-major complex 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    #[inline]
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    #[inline]
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[re(a), re(b)], [re(c), re(d)]])
    }

    #[inline]
    pub fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    #[inline]
    pub fn scalar(s: C64) -> Self {
        Mat2::diag(s, s)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    #[inline]
    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    #[inline]
    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    #[inline]
    pub fn adjugate(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[d, -b], [-c, a]])
    }

    /// Inverse, or `None` when |det| is below `tol`.
    #[inline]
    pub fn try_inverse(&self, tol: f64) -> Option<Self> {
        let det = self.det();
        if det.norm() <= tol {
            return None;
        }
        Some(self.adjugate().scale(det.inv()))
    }

    /// Inverse of a matrix known to be invertible (det close to 1 in practice).
    #[inline]
    pub fn inverse(&self) -> Self {
        self.adjugate().scale(self.det().inv())
    }

    #[inline]
    pub fn scale(&self, s: C64) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a * s, b * s], [c * s, d * s]])
    }

    #[inline]
    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a, c], [b, d]])
    }

    #[inline]
    pub fn conj(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a.conj(), b.conj()], [c.conj(), d.conj()]])
    }

    #[inline]
    pub fn adjoint(&self) -> Self {
        self.conj().transpose()
    }

    #[inline]
    pub fn commutator(&self, other: &Mat2) -> Self {
        *self * *other - *other * *self
    }

    /// Frobenius norm.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest absolute imaginary part of any entry.
    #[inline]
    pub fn max_imag(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |m, z| m.max(z.im.abs()))
    }

    #[inline]
    pub fn diagonal_part(&self) -> Self {
        Mat2::diag(self.0[0][0], self.0[1][1])
    }

    #[inline]
    pub fn off_diagonal_part(&self) -> Self {
        Mat2([[ZERO, self.0[0][1]], [self.0[1][0], ZERO]])
    }

    /// Divide by a square root of the determinant. The principal branch is
    /// continuous for determinants near 1.
    #[inline]
    pub fn normalize_det(&self) -> Self {
        let det = self.det();
        self.scale(det.sqrt().inv())
    }

    /// Exponential of a trace-free matrix, `cosh(s) I + sinh(s)/s A` with `s² = -det A`.
    pub fn exp_tracefree(&self) -> Self {
        let s2 = -self.det();
        let s = s2.sqrt();
        let (ch, sh_over_s) = if s.norm() < 1e-6 {
            // series: cosh s = 1 + s²/2 + s⁴/24, sinh(s)/s = 1 + s²/6 + s⁴/120
            (
                ONE + s2 / 2.0 + s2 * s2 / 24.0,
                ONE + s2 / 6.0 + s2 * s2 / 120.0,
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        Mat2::scalar(ch) + self.scale(sh_over_s)
    }

    /// Flatten to 8 reals: re/im of (11, 12, 21, 22).
    pub fn to_reals(&self) -> [f64; 8] {
        let [[a, b], [c, d]] = self.0;
        [a.re, a.im, b.re, b.im, c.re, c.im, d.re, d.im]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    #[inline]
    fn add(self, o: Mat2) -> Mat2 {
        let mut r = self;
        r += o;
        r
    }
}

impl AddAssign for Mat2 {
    #[inline]
    fn add_assign(&mut self, o: Mat2) {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += o.0[i][j];
            }
        }
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    #[inline]
    fn sub(self, o: Mat2) -> Mat2 {
        let mut r = self;
        r -= o;
        r
    }
}

impl SubAssign for Mat2 {
    #[inline]
    fn sub_assign(&mut self, o: Mat2) {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] -= o.0[i][j];
            }
        }
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    #[inline]
    fn neg(self) -> Mat2 {
        self.scale(re(-1.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, o: Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = o.0;
        Mat2([
            [a * e + b * g, a * f + b * h],
            [c * e + d * g, c * f + d * h],
        ])
    }
}

impl MulAssign for Mat2 {
    #[inline]
    fn mul_assign(&mut self, o: Mat2) {
        *self = *self * o;
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, s: f64) -> Mat2 {
        self.scale_re(s)
    }
}
