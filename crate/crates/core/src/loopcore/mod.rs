//! Twisted 2×2 matrix loops on the unit λ-circle.
//!
//! A loop is stored by its values at the `M` roots of unity
//! `λ_k = exp(2πik/M)`; Laurent coefficients are computed on demand by FFT and
//! cached. Coefficient index `j` lives in `[-M/2, M/2)`.

mod birkhoff;
mod laurent;

pub use birkhoff::{birkhoff_left, birkhoff_right, BirkhoffFactors, BirkhoffOptions};
pub use laurent::LaurentLoop;

use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, OnceLock};

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::mat2::{c, Mat2, C64, ZERO};
use crate::minkalg::RealForm;

/// Relative size under which a coefficient counts as zero.
pub const TAIL_TOL: f64 = 1e-8;

/// Sample count together with cached FFT plans. Cheap to clone.
#[derive(Clone)]
pub struct CircleGrid {
    m: usize,
    nodes: Arc<Vec<C64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CircleGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CircleGrid({})", self.m)
    }
}

impl PartialEq for CircleGrid {
    fn eq(&self, o: &Self) -> bool {
        self.m == o.m
    }
}

impl CircleGrid {
    pub fn new(m: usize) -> Self {
        assert!(
            m >= 4 && m % 2 == 0,
            "sample count must be even and at least 4"
        );
        let mut planner = FftPlanner::new();
        let nodes = (0..m)
            .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
            .collect();
        CircleGrid {
            m,
            nodes: Arc::new(nodes),
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn node(&self, k: usize) -> C64 {
        self.nodes[k]
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    /// Largest coefficient index held, `M/2 − 1`; index `−M/2` is also held.
    pub fn max_index(&self) -> i32 {
        (self.m / 2) as i32 - 1
    }

    #[inline]
    fn slot(&self, j: i32) -> usize {
        j.rem_euclid(self.m as i32) as usize
    }

    /// Signed index of storage slot `s`.
    #[inline]
    fn index(&self, s: usize) -> i32 {
        if s < self.m / 2 {
            s as i32
        } else {
            s as i32 - self.m as i32
        }
    }

    fn transform(&self, data: &[Mat2], forward: bool) -> Vec<Mat2> {
        let mut out = vec![Mat2::ZERO; self.m];
        let mut buf = vec![ZERO; self.m];
        let plan = if forward {
            &self.forward
        } else {
            &self.inverse
        };
        let scale = if forward { 1.0 / self.m as f64 } else { 1.0 };
        for r in 0..2 {
            for col in 0..2 {
                for (b, d) in buf.iter_mut().zip(data) {
                    *b = d.0[r][col];
                }
                plan.process(&mut buf);
                for (o, b) in out.iter_mut().zip(&buf) {
                    o.0[r][col] = b * scale;
                }
            }
        }
        out
    }

    /// Samples → coefficients (storage order).
    pub fn to_coeffs(&self, samples: &[Mat2]) -> Vec<Mat2> {
        self.transform(samples, true)
    }

    /// Coefficients (storage order) → samples.
    pub fn to_samples(&self, coeffs: &[Mat2]) -> Vec<Mat2> {
        self.transform(coeffs, false)
    }
}

/// A matrix loop in dual sample/coefficient form.
#[derive(Clone, Debug)]
pub struct TwistedLoop {
    grid: CircleGrid,
    samples: Vec<Mat2>,
    coeffs: OnceLock<Vec<Mat2>>,
    pub twisted: bool,
    pub form: RealForm,
}

impl TwistedLoop {
    pub fn from_samples(
        grid: &CircleGrid,
        samples: Vec<Mat2>,
        twisted: bool,
        form: RealForm,
    ) -> Self {
        assert_eq!(samples.len(), grid.len());
        TwistedLoop {
            grid: grid.clone(),
            samples,
            coeffs: OnceLock::new(),
            twisted,
            form,
        }
    }

    /// From a list of `(j, c_j)` pairs; unlisted coefficients are zero.
    pub fn from_coeffs(
        grid: &CircleGrid,
        coeffs: &[(i32, Mat2)],
        twisted: bool,
        form: RealForm,
    ) -> Self {
        let mut store = vec![Mat2::ZERO; grid.len()];
        for &(j, cj) in coeffs {
            assert!(
                j >= -(grid.len() as i32) / 2 && j <= grid.max_index(),
                "coefficient index {j} out of range"
            );
            store[grid.slot(j)] += cj;
        }
        Self::from_coeff_storage(grid, store, twisted, form)
    }

    fn from_coeff_storage(
        grid: &CircleGrid,
        store: Vec<Mat2>,
        twisted: bool,
        form: RealForm,
    ) -> Self {
        let samples = grid.to_samples(&store);
        let lp = Self::from_samples(grid, samples, twisted, form);
        let _ = lp.coeffs.set(store);
        lp
    }

    /// Sample a function of λ at the circle nodes.
    pub fn from_fn(
        grid: &CircleGrid,
        twisted: bool,
        form: RealForm,
        f: impl Fn(C64) -> Mat2,
    ) -> Self {
        let samples = grid.nodes().iter().map(|&l| f(l)).collect();
        Self::from_samples(grid, samples, twisted, form)
    }

    pub fn constant(grid: &CircleGrid, m: Mat2, form: RealForm) -> Self {
        Self::from_coeffs(grid, &[(0, m)], true, form)
    }

    pub fn identity(grid: &CircleGrid, form: RealForm) -> Self {
        Self::constant(grid, Mat2::IDENTITY, form)
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Mat2] {
        &self.samples
    }

    fn coeff_store(&self) -> &[Mat2] {
        self.coeffs
            .get_or_init(|| self.grid.to_coeffs(&self.samples))
    }

    /// Laurent coefficient `c_j` (zero outside the held range).
    pub fn coeff(&self, j: i32) -> Mat2 {
        let half = (self.grid.len() / 2) as i32;
        if j < -half || j >= half {
            return Mat2::ZERO;
        }
        self.coeff_store()[self.grid.slot(j)]
    }

    /// `(j, c_j)` for all held indices, ascending.
    pub fn coeffs(&self) -> Vec<(i32, Mat2)> {
        let half = (self.grid.len() / 2) as i32;
        (-half..half).map(|j| (j, self.coeff(j))).collect()
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeff_store()
            .iter()
            .map(|m| m.norm())
            .fold(0.0, f64::max)
    }

    /// `max_{|j| ≥ n} ‖c_j‖ / max_j ‖c_j‖`.
    pub fn tail_ratio(&self, n: i32) -> f64 {
        let store = self.coeff_store();
        let top = self.max_coeff_norm();
        if top == 0.0 {
            return 0.0;
        }
        let tail = store
            .iter()
            .enumerate()
            .filter(|(s, _)| self.grid.index(*s).abs() >= n)
            .map(|(_, m)| m.norm())
            .fold(0.0, f64::max);
        tail / top
    }

    /// Evaluate `Σ c_j λ₀^j`.
    pub fn eval(&self, lambda: C64) -> Result<Mat2> {
        let half = (self.grid.len() / 2) as i32;
        let scale = self.max_coeff_norm().max(1e-300);
        if lambda.norm() == 0.0 || !lambda.is_finite() {
            let neg = lambda.norm() == 0.0;
            let tail = (-half..half)
                .filter(|&j| if neg { j < 0 } else { j > 0 })
                .map(|j| self.coeff(j).norm())
                .fold(0.0, f64::max);
            if tail > 1e-14 * scale {
                return Err(Error::Numerical(format!(
                    "loop has a nonzero {} tail, cannot evaluate at λ = {}",
                    if neg { "negative" } else { "positive" },
                    if neg { "0" } else { "∞" }
                )));
            }
            return Ok(self.coeff(0));
        }
        // Horner in λ and λ⁻¹ separately
        let mut pos = Mat2::ZERO;
        for j in (0..half).rev() {
            pos = pos * lambda + self.coeff(j);
        }
        let inv = lambda.inv();
        let mut neg = Mat2::ZERO;
        for j in (1..=half).rev() {
            neg = (neg + self.coeff(-j)) * inv;
        }
        Ok(pos + neg)
    }

    /// Pointwise product. Tags combine: twisted iff both are.
    pub fn mul(&self, o: &TwistedLoop) -> Result<TwistedLoop> {
        self.check_compatible(o)?;
        let s = self
            .samples
            .iter()
            .zip(&o.samples)
            .map(|(a, b)| *a * *b)
            .collect();
        Ok(Self::from_samples(
            &self.grid,
            s,
            self.twisted && o.twisted,
            self.form,
        ))
    }

    /// Pointwise inverse.
    pub fn inv(&self) -> Result<TwistedLoop> {
        let mut s = Vec::with_capacity(self.samples.len());
        for (k, m) in self.samples.iter().enumerate() {
            let i = m
                .try_inverse(1e-12 * m.norm().max(1.0) * m.norm().max(1.0))
                .ok_or_else(|| Error::Singular(format!("loop sample {k} is singular")))?;
            s.push(i);
        }
        Ok(Self::from_samples(&self.grid, s, self.twisted, self.form))
    }

    fn check_compatible(&self, o: &TwistedLoop) -> Result<()> {
        if self.grid != o.grid {
            return Err(Error::Numerical("loops sampled on different grids".into()));
        }
        if self.form != o.form {
            return Err(Error::FormMismatch("loops of different real forms".into()));
        }
        Ok(())
    }

    /// `λ∂_λL` as a loop (coefficients `j c_j`).
    pub fn lambda_derivative(&self) -> TwistedLoop {
        let store = self.coeff_store();
        let d: Vec<Mat2> = store
            .iter()
            .enumerate()
            .map(|(s, m)| *m * self.grid.index(s) as f64)
            .collect();
        Self::from_coeff_storage(&self.grid, d, self.twisted, self.form)
    }

    /// `λ∂_λL · L⁻¹`.
    pub fn lambda_log_derivative(&self) -> Result<TwistedLoop> {
        let inv = self.inv()?;
        let d = self.lambda_derivative();
        let s = d
            .samples
            .iter()
            .zip(&inv.samples)
            .map(|(a, b)| *a * *b)
            .collect();
        Ok(Self::from_samples(&self.grid, s, self.twisted, self.form))
    }

    /// Pointwise determinant normalization.
    pub fn normalize_det(&self) -> TwistedLoop {
        let s = self.samples.iter().map(|m| m.normalize_det()).collect();
        Self::from_samples(&self.grid, s, self.twisted, self.form)
    }

    /// `L(1/λ)`: reverses the sample order.
    pub fn reflect(&self) -> TwistedLoop {
        let m = self.grid.len();
        let s = (0..m).map(|k| self.samples[(m - k) % m]).collect();
        Self::from_samples(&self.grid, s, self.twisted, self.form)
    }

    /// Maximum of `|det − 1|` over the samples.
    pub fn det_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|m| (m.det() - 1.0).norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient violating the twisting parity, relative to the
    /// largest coefficient.
    pub fn parity_defect(&self) -> f64 {
        let store = self.coeff_store();
        let top = self.max_coeff_norm().max(1e-300);
        let bad = store
            .iter()
            .enumerate()
            .map(|(s, m)| {
                if self.grid.index(s).rem_euclid(2) == 0 {
                    m.off_diagonal_part().norm()
                } else {
                    m.diagonal_part().norm()
                }
            })
            .fold(0.0, f64::max);
        bad / top
    }

    /// Deviation from the real-form condition: imaginary parts of the
    /// coefficients (split), or `‖L(λ)L(λ̄)† − I‖` over the samples (unitary).
    pub fn realform_defect(&self) -> f64 {
        match self.form {
            RealForm::Split => self
                .coeff_store()
                .iter()
                .map(|m| m.max_imag())
                .fold(0.0, f64::max),
            RealForm::Unitary => {
                let m = self.grid.len();
                (0..m)
                    .map(|k| {
                        let p = self.samples[k] * self.samples[(m - k) % m].adjoint();
                        (p - Mat2::IDENTITY).norm()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Largest sample difference.
    pub fn distance(&self, o: &TwistedLoop) -> f64 {
        self.samples
            .iter()
            .zip(&o.samples)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }

    /// Keep coefficients with `lo ≤ j ≤ hi`.
    pub fn project(&self, lo: i32, hi: i32) -> TwistedLoop {
        let store: Vec<Mat2> = self
            .coeff_store()
            .iter()
            .enumerate()
            .map(|(s, m)| {
                let j = self.grid.index(s);
                if j >= lo && j <= hi {
                    *m
                } else {
                    Mat2::ZERO
                }
            })
            .collect();
        Self::from_coeff_storage(&self.grid, store, self.twisted, self.form)
    }

    /// Compact coefficient form, dropping outer coefficients below
    /// `tol · max‖c_j‖`.
    pub fn to_laurent(&self, tol: f64) -> LaurentLoop {
        let half = (self.grid.len() / 2) as i32;
        let top = self.max_coeff_norm();
        let keep = |j: i32| self.coeff(j).norm() > tol * top;
        let lo = (-half..=0).find(|&j| keep(j)).unwrap_or(0);
        let hi = (0..half).rev().find(|&j| keep(j)).unwrap_or(0);
        LaurentLoop::new(lo, (lo..=hi).map(|j| self.coeff(j)).collect(), self.form)
    }

    /// Debug dump: one row per coefficient, `j` and the 8 real components.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "j,re11,im11,re12,im12,re21,im21,re22,im22")?;
        for (j, m) in self.coeffs() {
            let r = m.to_reals();
            let row: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{j},{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Loop evaluation, free-function form.
pub fn loop_eval(l: &TwistedLoop, lambda: C64) -> Result<Mat2> {
    l.eval(lambda)
}

pub fn loop_mul(a: &TwistedLoop, b: &TwistedLoop) -> Result<TwistedLoop> {
    a.mul(b)
}

pub fn loop_inv(a: &TwistedLoop) -> Result<TwistedLoop> {
    a.inv()
}

pub fn lambda_log_derivative(l: &TwistedLoop) -> Result<TwistedLoop> {
    l.lambda_log_derivative()
}

/// `λ` as a complex number on the circle with angle `θ`.
pub fn circle_point(theta: f64) -> C64 {
    c(theta.cos(), theta.sin())
}
