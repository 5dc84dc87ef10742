//! From a potential pair to an admissible frame field: the loop ODEs for
//! `F̂₊(x)` and `F̂₋(y)`, the per-node splitting `F̂₊⁻¹F̂₋ = Ĥ₋Ĥ₊`, gauges and
//! the Sym formulas.

mod gauge;
mod sym;

pub use gauge::{gauge_cmc, gauge_psph, CmcGauge, PsphGauge};
pub use sym::{sym_cmc, sym_psph, SymNode};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loopcore::{birkhoff_left, BirkhoffOptions, CircleGrid, LaurentLoop, TwistedLoop};
use crate::mat2::{Mat2, C64};
use crate::minkalg::RealForm;
use crate::par::{map_range, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Cmc,
    Psph,
}

impl SurfaceKind {
    pub fn form(self) -> RealForm {
        match self {
            SurfaceKind::Cmc => RealForm::Split,
            SurfaceKind::Psph => RealForm::Unitary,
        }
    }
}

/// `A(λ) = m1 λ⁻¹ + z0 + p1 λ` at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LaurentTriple {
    pub m1: Mat2,
    pub z0: Mat2,
    pub p1: Mat2,
}

impl LaurentTriple {
    pub const ZERO: LaurentTriple = LaurentTriple {
        m1: Mat2::ZERO,
        z0: Mat2::ZERO,
        p1: Mat2::ZERO,
    };

    pub fn new(m1: Mat2, z0: Mat2, p1: Mat2) -> Self {
        LaurentTriple { m1, z0, p1 }
    }

    #[inline]
    pub fn eval(&self, lambda: C64) -> Mat2 {
        self.m1 * lambda.inv() + self.z0 + self.p1 * lambda
    }

    pub fn scale(&self, s: f64) -> Self {
        LaurentTriple::new(self.m1 * s, self.z0 * s, self.p1 * s)
    }

    /// Twisting: constant part diagonal, `λ^{±1}` parts off-diagonal.
    pub fn parity_defect(&self) -> f64 {
        self.z0
            .off_diagonal_part()
            .norm()
            .max(self.m1.diagonal_part().norm())
            .max(self.p1.diagonal_part().norm())
    }

    pub fn realform_defect(&self, form: RealForm) -> f64 {
        let parts = [self.m1, self.z0, self.p1];
        match form {
            RealForm::Split => parts.iter().map(|m| m.max_imag()).fold(0.0, f64::max),
            RealForm::Unitary => parts
                .iter()
                .map(|m| (*m + m.adjoint()).norm())
                .fold(0.0, f64::max),
        }
    }
}

pub type CoeffFn = Arc<dyn Fn(f64) -> LaurentTriple + Send + Sync>;

/// Two loop-algebra valued 1-forms `χ = A_χ(x)dx`, `ψ = A_ψ(y)dy`. The ODEs
/// start from `F̂₊(x_base) = I`, `F̂₋(y_base) = I`.
#[derive(Clone)]
pub struct PotentialPair {
    pub chi: CoeffFn,
    pub psi: CoeffFn,
    pub kind: SurfaceKind,
    pub x_base: f64,
    pub y_base: f64,
}

impl fmt::Debug for PotentialPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialPair")
            .field("kind", &self.kind)
            .field("x_base", &self.x_base)
            .field("y_base", &self.y_base)
            .finish()
    }
}

/// Result of checking a pair on sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    /// `χ` has no `λ⁻¹` part beyond `ψ`'s lowest order, and so on: the
    /// support bounds are structural for triples and always hold.
    pub parity_defect: f64,
    pub realform_defect: f64,
    /// Smallest `|[χ₁]₂₁|` (CMC) or `|[χ₁]₁₂|` (K-surfaces).
    pub min_chi_regular: f64,
    /// Smallest `|[ψ₋₁]₁₂|`.
    pub min_psi_regular: f64,
    pub regular: bool,
}

impl PotentialPair {
    pub fn new(chi: CoeffFn, psi: CoeffFn, kind: SurfaceKind) -> Self {
        PotentialPair {
            chi,
            psi,
            kind,
            x_base: 0.0,
            y_base: 0.0,
        }
    }

    pub fn constant(chi: LaurentTriple, psi: LaurentTriple, kind: SurfaceKind) -> Self {
        Self::new(Arc::new(move |_| chi), Arc::new(move |_| psi), kind)
    }

    pub fn with_base(mut self, x_base: f64, y_base: f64) -> Self {
        self.x_base = x_base;
        self.y_base = y_base;
        self
    }

    pub fn form(&self) -> RealForm {
        self.kind.form()
    }

    pub fn check(&self, xs: &[f64], ys: &[f64]) -> PairReport {
        let form = self.form();
        let mut parity: f64 = 0.0;
        let mut real: f64 = 0.0;
        let mut chi_reg = f64::INFINITY;
        let mut psi_reg = f64::INFINITY;
        for &x in xs {
            let a = (self.chi)(x);
            parity = parity.max(a.parity_defect());
            real = real.max(a.realform_defect(form));
            let r = match self.kind {
                SurfaceKind::Cmc => a.p1.get(1, 0).norm(),
                SurfaceKind::Psph => a.p1.get(0, 1).norm(),
            };
            chi_reg = chi_reg.min(r);
        }
        for &y in ys {
            let b = (self.psi)(y);
            parity = parity.max(b.parity_defect());
            real = real.max(b.realform_defect(form));
            psi_reg = psi_reg.min(b.m1.get(0, 1).norm());
        }
        PairReport {
            parity_defect: parity,
            realform_defect: real,
            min_chi_regular: chi_reg,
            min_psi_regular: psi_reg,
            regular: chi_reg > 1e-12 && psi_reg > 1e-12,
        }
    }
}

/// Rectangular grid in the null (or asymptotic) coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Self {
        GridSpec {
            x_range,
            y_range,
            nx,
            ny,
        }
    }

    pub fn square(lo: f64, hi: f64, n: usize) -> Self {
        Self::new((lo, hi), (lo, hi), n, n)
    }

    fn axis(r: (f64, f64), n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![r.0];
        }
        (0..n)
            .map(|i| r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_range, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_range, self.ny)
    }

    pub fn hx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.nx.max(2) - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_range.1 - self.y_range.0) / (self.ny.max(2) - 1) as f64
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.1 > r.0;
        if self.nx < 5 || self.ny < 5 || !ok(self.x_range) || !ok(self.y_range) {
            return Err(Error::Config(format!("invalid grid {self:?}")));
        }
        Ok(())
    }
}

/// Step control for the loop ODEs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    /// Steps per unit parameter length.
    pub per_unit: usize,
    /// Minimum number of steps across the whole interval.
    pub min_total: usize,
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule {
            per_unit: 800,
            min_total: 400,
        }
    }
}

impl StepRule {
    /// Step length for an interval of length `len` carrying `n` nodes.
    pub fn step(&self, len: f64, n: usize) -> f64 {
        let total = self.min_total.max(4 * n.saturating_sub(1)) as f64;
        (1.0 / self.per_unit as f64).min(len / total)
    }
}

/// Solve `F⁻¹dF = A(t)dt`, `F(t0) = I`, at every circle node by classical
/// RK4, and return `F` at each target (any order). Substeps between
/// consecutive targets are uniform with length at most `h`.
pub fn integrate_potential(
    a: &(dyn Fn(f64) -> LaurentTriple + Sync),
    circle: &CircleGrid,
    form: RealForm,
    t0: f64,
    targets: &[f64],
    h: f64,
) -> Result<Vec<TwistedLoop>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Numerical(format!("invalid ODE step {h}")));
    }
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&i, &j| targets[i].total_cmp(&targets[j]));
    let mut out: Vec<Option<TwistedLoop>> = vec![None; targets.len()];
    let fwd: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| targets[i] >= t0)
        .collect();
    let bwd: Vec<usize> = order
        .iter()
        .rev()
        .copied()
        .filter(|&i| targets[i] < t0)
        .collect();
    for sweep in [fwd, bwd] {
        let mut f = vec![Mat2::IDENTITY; circle.len()];
        let mut t = t0;
        for i in sweep {
            let span = targets[i] - t;
            let n = (span.abs() / h).ceil() as usize;
            if n > 0 {
                let dt = span / n as f64;
                for _ in 0..n {
                    rk4_step(a, circle, &mut f, t, dt)?;
                    t += dt;
                }
            }
            t = targets[i];
            out[i] = Some(TwistedLoop::from_samples(circle, f.clone(), true, form));
        }
    }
    Ok(out
        .into_iter()
        .map(|l| l.expect("every target visited"))
        .collect())
}

fn rk4_step(
    a: &(dyn Fn(f64) -> LaurentTriple + Sync),
    circle: &CircleGrid,
    f: &mut [Mat2],
    t: f64,
    h: f64,
) -> Result<()> {
    let a1 = a(t);
    let a2 = a(t + 0.5 * h);
    let a4 = a(t + h);
    let mut drift: f64 = 0.0;
    for (fk, &lam) in f.iter_mut().zip(circle.nodes()) {
        let x1 = a1.eval(lam);
        let x2 = a2.eval(lam);
        let x4 = a4.eval(lam);
        let y = *fk;
        let k1 = y * x1;
        let k2 = (y + k1 * (0.5 * h)) * x2;
        let k3 = (y + k2 * (0.5 * h)) * x2;
        let k4 = (y + k3 * h) * x4;
        let next = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        drift = drift.max((next.det() - 1.0).norm());
        *fk = next.normalize_det();
    }
    if !(drift <= 1e-6) {
        return Err(Error::Numerical(format!(
            "determinant drift {drift:.3e} in one ODE step at t = {t}"
        )));
    }
    Ok(())
}

/// Numerical parameters for building a frame field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameOptions {
    pub samples: usize,
    pub birkhoff: BirkhoffOptions,
    pub steps: StepRule,
    /// Relative size below which outer Laurent coefficients of a frame are
    /// dropped when stored. Must sit above the FFT round-off floor: off the
    /// unit circle a coefficient `c_j` is amplified by `|λ₀|^j`.
    pub store_tol: f64,
    pub exec: Execution,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            samples: 128,
            birkhoff: BirkhoffOptions::default(),
            steps: StepRule::default(),
            store_tol: 1e-13,
            exec: Execution::Parallel,
        }
    }
}

/// Frame data at one grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameNode {
    pub frame: LaurentLoop,
    /// `Ĥ₊` at `λ = 0`.
    pub h_plus0: Mat2,
    pub residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug)]
pub struct FrameField {
    pub grid: GridSpec,
    pub kind: SurfaceKind,
    pub nodes: Vec<std::result::Result<FrameNode, Error>>,
    /// Diagonal gauge applied to every node (identity until gauged).
    pub gauge: Vec<Mat2>,
    /// `χ₁(x_i)` per column and `ψ₋₁(y_j)` per row.
    pub chi1: Vec<Mat2>,
    pub psi_m1: Vec<Mat2>,
}

impl FrameField {
    pub fn is_valid(&self, idx: usize) -> bool {
        self.nodes[idx].is_ok()
    }

    pub fn node(&self, idx: usize) -> Option<&FrameNode> {
        self.nodes[idx].as_ref().ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        self.nodes.iter().map(|n| n.is_ok()).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_ok()).count()
    }

    pub fn big_cell_failures(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Err(Error::BigCellFailure { .. })))
            .count()
    }

    pub fn max_residual(&self) -> f64 {
        self.nodes
            .iter()
            .filter_map(|n| n.as_ref().ok())
            .map(|n| n.residual)
            .fold(0.0, f64::max)
    }

    /// Frame at `λ` at a node, gauge included.
    pub fn frame_at(&self, idx: usize, lambda: C64) -> Option<Mat2> {
        self.node(idx)
            .map(|n| n.frame.eval(lambda) * self.gauge[idx])
    }
}

/// Integrate both potentials along the grid axes, split every node and store
/// the admissible frame `F̂ = F̂₋Ĥ₊⁻¹`.
pub fn build_frame_field(
    pair: &PotentialPair,
    grid: &GridSpec,
    opts: &FrameOptions,
) -> Result<FrameField> {
    grid.validate()?;
    let circle = CircleGrid::new(opts.samples);
    let form = pair.form();
    let xs = grid.xs();
    let ys = grid.ys();
    let lx = (grid.x_range.1 - grid.x_range.0).max((grid.x_range.1 - pair.x_base).abs());
    let ly = (grid.y_range.1 - grid.y_range.0).max((grid.y_range.1 - pair.y_base).abs());
    let hx = opts.steps.step(lx, grid.nx);
    let hy = opts.steps.step(ly, grid.ny);
    let chi = pair.chi.clone();
    let psi = pair.psi.clone();
    let fplus = integrate_potential(&*chi, &circle, form, pair.x_base, &xs, hx)?;
    let fminus = integrate_potential(&*psi, &circle, form, pair.y_base, &ys, hy)?;
    let fplus_inv: Vec<TwistedLoop> = fplus.iter().map(|l| l.inv()).collect::<Result<_>>()?;

    let nodes = map_range(grid.len(), opts.exec, |idx| {
        let (i, j) = grid.coords(idx);
        let phi = fplus_inv[i].mul(&fminus[j])?;
        let f = birkhoff_left(&phi, &opts.birkhoff)?;
        let hp_inv = f.plus.inv()?;
        let frame = fminus[j].mul(&hp_inv)?;
        Ok(FrameNode {
            frame: frame.to_laurent(opts.store_tol),
            h_plus0: f.plus.coeff(0),
            residual: f.residual,
            condition: f.condition,
        })
    });
    Ok(FrameField {
        grid: *grid,
        kind: pair.kind,
        nodes,
        gauge: vec![Mat2::IDENTITY; grid.len()],
        chi1: xs.iter().map(|&x| chi(x).p1).collect(),
        psi_m1: ys.iter().map(|&y| psi(y).m1).collect(),
    })
}

/// `(A₁, A₋₁)` of the (ungauged) frame at every valid node:
/// `A₁ = χ₁(x)`, `A₋₁ = Ĥ₊(0) ψ₋₁(y) Ĥ₊(0)⁻¹`.
pub fn maurer_cartan_coeffs(field: &FrameField) -> Vec<Option<(Mat2, Mat2)>> {
    (0..field.grid.len())
        .map(|idx| {
            let (i, j) = field.grid.coords(idx);
            field.node(idx).map(|n| {
                let h = n.h_plus0;
                (field.chi1[i], h * field.psi_m1[j] * h.inverse())
            })
        })
        .collect()
}
