//! Surfaces from frame fields, and the quantitative checks run on them.

mod diagnostics;

pub use diagnostics::{
    cauchy_residual, gauss_curvature, geodesic_residual, mean_curvature, normal_consistency,
    sine_gordon_residual, CheckResult, CurvatureField, DiagnosticsReport, SineGordonData,
};

use serde::{Deserialize, Serialize};

use crate::cauchydata::{Ambient, CaseKind, CauchyPotential, CurveMap, Placement};
use crate::error::{Error, Result};
use crate::framegen::{
    build_frame_field, gauge_psph, sym_cmc, sym_psph, FrameField, FrameOptions, GridSpec,
    PotentialPair, PsphGauge, SurfaceKind,
};
use crate::minkalg::{AmbientVector, Vec3E, Vec3L};

/// Everything recorded about how a mesh was made.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshMeta {
    pub kind: SurfaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseKind>,
    /// Mean curvature (CMC) or Gauss curvature (K-surfaces) the surface should
    /// have.
    pub target_curvature: f64,
    pub lambda0: f64,
    pub truncation: usize,
    pub samples: usize,
    pub steps_per_unit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<Placement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_map: Option<CurveMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    pub base: (f64, f64),
    pub big_cell_failures: usize,
    pub regularity_failures: usize,
}

/// Surface positions and unit normals on a grid, in user coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub grid: GridSpec,
    pub ambient: Ambient,
    pub positions: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub mask: Vec<bool>,
    pub meta: MeshMeta,
}

impl SurfaceMesh {
    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn coverage(&self) -> f64 {
        self.valid_count() as f64 / self.mask.len().max(1) as f64
    }

    pub fn signature(&self) -> [f64; 3] {
        match self.ambient {
            Ambient::Lorentz => Vec3L::SIGNATURE,
            Ambient::Euclid => Vec3E::SIGNATURE,
        }
    }

    pub fn ip(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let s = self.signature();
        s[0] * a[0] * b[0] + s[1] * a[1] * b[1] + s[2] * a[2] * b[2]
    }

    pub fn cross(&self, a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        match self.ambient {
            Ambient::Lorentz => Vec3L::from_coords(a).cross(&Vec3L::from_coords(b)).coords(),
            Ambient::Euclid => Vec3E::from_coords(a).cross(&Vec3E::from_coords(b)).coords(),
        }
    }

    /// Node index if `(i, j)` lies on the grid and is unmasked.
    pub fn valid(&self, i: isize, j: isize) -> Option<usize> {
        let g = &self.grid;
        if i < 0 || j < 0 || i >= g.nx as isize || j >= g.ny as isize {
            return None;
        }
        let idx = g.index(i as usize, j as usize);
        self.mask[idx].then_some(idx)
    }
}

/// A mesh with the frame field it came from.
#[derive(Clone, Debug)]
pub struct Surface {
    pub mesh: SurfaceMesh,
    pub field: FrameField,
    /// K-surfaces: per-node gauge data (`θ`, `|f_x|`, `|f_y|`).
    pub psph_gauge: Option<Vec<Option<PsphGauge>>>,
}

/// Optional data attached to a surface built from a bare pair.
#[derive(Clone, Debug, Default)]
pub struct PairContext {
    pub mean_curvature: Option<f64>,
    pub placement: Option<Placement>,
    pub case: Option<CaseKind>,
    pub curve_map: Option<CurveMap>,
    pub t0: Option<f64>,
}

fn place<V: AmbientVector>(
    nodes: Vec<Option<crate::framegen::SymNode<V>>>,
    map: impl Fn(V, V) -> (V, V),
) -> (Vec<[f64; 3]>, Vec<[f64; 3]>, Vec<bool>) {
    let mut pos = Vec::with_capacity(nodes.len());
    let mut nor = Vec::with_capacity(nodes.len());
    let mut mask = Vec::with_capacity(nodes.len());
    for n in nodes {
        match n {
            Some(n) => {
                let (p, q) = map(n.pos, n.normal);
                pos.push(p.coords());
                nor.push(q.coords());
                mask.push(p.coords().iter().chain(&q.coords()).all(|x| x.is_finite()));
            }
            None => {
                pos.push([f64::NAN; 3]);
                nor.push([f64::NAN; 3]);
                mask.push(false);
            }
        }
    }
    (pos, nor, mask)
}

/// Frames, Sym formula and placement for a potential pair.
pub fn surface_from_pair(
    pair: &PotentialPair,
    grid: &GridSpec,
    opts: &FrameOptions,
    lambda0: f64,
    ctx: &PairContext,
) -> Result<Surface> {
    let field = build_frame_field(pair, grid, opts)?;
    let big_cell_failures = field.big_cell_failures();
    let (ambient, positions, normals, mask, gauge, field, target) = match pair.kind {
        SurfaceKind::Cmc => {
            let h = ctx
                .mean_curvature
                .ok_or_else(|| Error::Config("CMC surface needs H".into()))?;
            let nodes = sym_cmc(&field, lambda0, h, None, opts.exec)?;
            let (p, n, m) = match ctx.placement {
                Some(Placement::Lorentz(iso)) => {
                    place(nodes, |p, n| (iso.apply(p), iso.apply_vector(n)))
                }
                Some(Placement::Euclid(_)) => {
                    return Err(Error::FormMismatch("Euclidean placement of a CMC surface".into()))
                }
                None => place(nodes, |p, n| (p, n)),
            };
            (Ambient::Lorentz, p, n, m, None, field, h)
        }
        SurfaceKind::Psph => {
            let (gauged, info) = gauge_psph(&field)?;
            let nodes = sym_psph(&gauged, lambda0, opts.exec)?;
            let (p, n, m) = match ctx.placement {
                Some(Placement::Euclid(iso)) => {
                    place(nodes, |p, n| (iso.apply(p), iso.apply_vector(n)))
                }
                Some(Placement::Lorentz(_)) => {
                    return Err(Error::FormMismatch("Lorentzian placement of a K-surface".into()))
                }
                None => place(nodes, |p, n| (p, n)),
            };
            (Ambient::Euclid, p, n, m, Some(info), gauged, -1.0)
        }
    };
    let regularity_failures = field.nodes.iter().filter(|n| n.is_err()).count() - big_cell_failures;
    let mesh = SurfaceMesh {
        grid: *grid,
        ambient,
        positions,
        normals,
        mask,
        meta: MeshMeta {
            kind: pair.kind,
            case: ctx.case,
            target_curvature: target,
            lambda0,
            truncation: opts.birkhoff.truncation,
            samples: opts.samples,
            steps_per_unit: opts.steps.per_unit,
            placement: ctx.placement,
            curve_map: ctx.curve_map,
            t0: ctx.t0,
            base: (pair.x_base, pair.y_base),
            big_cell_failures,
            regularity_failures,
        },
    };
    Ok(Surface {
        mesh,
        field,
        psph_gauge: gauge,
    })
}

/// Solve a Cauchy problem on `grid`.
pub fn solve(
    pot: &CauchyPotential,
    grid: &GridSpec,
    opts: &FrameOptions,
    lambda0: f64,
) -> Result<Surface> {
    let ctx = PairContext {
        mean_curvature: pot.mean_curvature,
        placement: Some(pot.placement),
        case: Some(pot.case()),
        curve_map: Some(pot.curve_map),
        t0: Some(pot.t0),
    };
    surface_from_pair(&pot.pair, grid, opts, lambda0, &ctx)
}

/// Grid on which the curve `t ∈ [a, b]` runs through grid nodes: the
/// antidiagonal of `[a, b] × [−b, −a]`, the diagonal of `[a, b]²`, or the
/// row `y = 0` of `[a, b] × [−w, w]` (`n` made odd).
pub fn default_grid(map: CurveMap, domain: (f64, f64), n: usize) -> GridSpec {
    let (a, b) = domain;
    match map {
        CurveMap::Antidiagonal => GridSpec::new((a, b), (-b, -a), n, n),
        CurveMap::Diagonal => GridSpec::new((a, b), (a, b), n, n),
        CurveMap::XAxis => {
            let n = n | 1;
            let w = 0.5 * (b - a);
            GridSpec::new((a, b), (-w, w), n, n)
        }
    }
}
