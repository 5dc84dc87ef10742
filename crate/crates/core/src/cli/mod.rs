//! Pipeline orchestration behind the `surfcauchy` binary: curve → case →
//! potentials → frames → Sym → diagnostics, plus mesh export and a cache
//! for rerunning diagnostics.

mod config;
mod export;
mod expr;

pub use config::{Axis, JobConfig, Problem, Tolerances, KEYS};
pub use export::{fmt_g17, read_csv_into, write_csv, write_obj, CSV_HEADER};
pub use expr::{parse_expression, Expr};

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cauchydata::{
    catalog_curve, potential_cmc_noncharacteristic, potential_cmc_null,
    potential_psph_characteristic, potential_psph_noncharacteristic, read_curve_csv, Ambient,
    CauchyPotential, CurveData, FieldFill, FieldKind,
};
use crate::error::{Error, Result};
use crate::framegen::{FrameOptions, GridSpec, PsphGauge, SurfaceKind};
use crate::surface::{
    cauchy_residual, default_grid, gauss_curvature, geodesic_residual, mean_curvature,
    sine_gordon_residual, solve, DiagnosticsReport, SineGordonData, SurfaceMesh,
};

/// Exit status for an error: 2 configuration, 3 hypothesis, 4 numerical.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Syntax { .. } | Error::Io(_) | Error::Curve(_) => 2,
        Error::HypothesisViolation { .. } | Error::MixedType(_) => 3,
        _ => 4,
    }
}

/// Catalog spec used when the config names none.
fn default_curve(cfg: &JobConfig) -> Result<Option<String>> {
    let null_axis = || match cfg.h {
        Some(h) => format!("null-axis:H={h}"),
        None => "null-axis".into(),
    };
    Ok(match cfg.problem {
        Problem::CmcRevolution => {
            if cfg.curve.is_some() || cfg.curve_csv.is_some() {
                return Err(Error::Config("cmc-revolution takes axis and rho, not a curve".into()));
            }
            Some(match cfg.axis {
                Axis::Timelike => format!("lcircle:rho={}", cfg.rho),
                Axis::Null => null_axis(),
            })
        }
        Problem::CmcNull if cfg.curve.is_none() && cfg.curve_csv.is_none() => Some(null_axis()),
        Problem::PsphAsymptotic if cfg.curve.is_none() && cfg.curve_csv.is_none() => {
            Some("asymptotic-helix".into())
        }
        _ => cfg.curve.clone(),
    })
}

/// Curve data named by the config.
pub fn load_curve(cfg: &JobConfig) -> Result<CurveData> {
    if let Some(path) = &cfg.curve_csv {
        let (ambient, kind, fill) = if cfg.problem.is_cmc() {
            (Ambient::Lorentz, FieldKind::Velocity, FieldFill::Required)
        } else {
            (Ambient::Euclid, FieldKind::Normal, FieldFill::PrincipalNormal)
        };
        let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let name = path.display().to_string();
        return read_curve_csv(BufReader::new(f), &name, ambient, kind, fill);
    }
    let spec = default_curve(cfg)?.ok_or_else(|| Error::Config("no curve given".into()))?;
    let data = catalog_curve(&spec.parse()?)?;
    let want = if cfg.problem.is_cmc() { Ambient::Lorentz } else { Ambient::Euclid };
    if data.ambient != want {
        return Err(Error::Config(format!(
            "curve '{spec}' lives in the wrong space for problem {}",
            cfg.problem
        )));
    }
    Ok(data)
}

/// The prescribed normal must be the principal normal (up to sign) wherever
/// the curvature does not vanish.
fn require_principal_normal(data: &CurveData) -> Result<()> {
    for p in data.samples(201) {
        let t2: f64 = p.d1.iter().map(|v| v * v).sum();
        let k = p.d1.iter().zip(&p.d2).map(|(a, b)| a * b).sum::<f64>() / t2;
        let n = [0, 1, 2].map(|c| p.d2[c] - k * p.d1[c]);
        let len = n.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len <= 1e-9 {
            continue;
        }
        let f = p.field;
        let cr = [
            f[1] * n[2] - f[2] * n[1],
            f[2] * n[0] - f[0] * n[2],
            f[0] * n[1] - f[1] * n[0],
        ];
        let off = cr.iter().map(|v| v * v).sum::<f64>().sqrt() / len;
        if off > 1e-6 {
            return Err(Error::hypothesis(
                format!("normal is not the principal normal (off by {off:.3e})"),
                p.t,
                p.t,
            ));
        }
    }
    Ok(())
}

fn real_fn(src: Option<&str>, default: &str) -> Result<crate::cauchydata::ScalarFn> {
    let e = parse_expression(src.unwrap_or(default))?;
    Ok(Arc::new(move |y| e.eval_real(y)))
}

/// Curve data and boundary potentials for a config.
pub fn prepare(cfg: &JobConfig) -> Result<(CurveData, CauchyPotential)> {
    cfg.validate()?;
    let data = load_curve(cfg)?;
    let pot = match cfg.problem {
        Problem::Cmc => potential_cmc_noncharacteristic(&data, cfg.h.expect("validated"))?,
        Problem::CmcRevolution if cfg.axis == Axis::Timelike => {
            potential_cmc_noncharacteristic(&data, cfg.h.expect("validated"))?
        }
        Problem::CmcNull | Problem::CmcRevolution => potential_cmc_null(
            &data,
            real_fn(cfg.alpha.as_deref(), "1")?,
            real_fn(cfg.beta.as_deref(), "0")?,
            cfg.h,
        )?,
        Problem::Psph => {
            if cfg.geodesic {
                require_principal_normal(&data)?;
            }
            potential_psph_noncharacteristic(&data)?
        }
        Problem::PsphAsymptotic => {
            let e = parse_expression(cfg.alpha.as_deref().unwrap_or("0.5"))?;
            potential_psph_characteristic(&data, Arc::new(move |y| e.eval(y)))?
        }
    };
    Ok((data, pot))
}

/// Grid for a config: the default grid around the curve, with any explicit
/// ranges and node counts applied on top.
pub fn grid_for(cfg: &JobConfig, data: &CurveData, pot: &CauchyPotential, n: usize) -> Result<GridSpec> {
    let d = default_grid(pot.curve_map, data.domain, n);
    let g = GridSpec::new(
        cfg.x_range.unwrap_or(d.x_range),
        cfg.y_range.unwrap_or(d.y_range),
        cfg.nx.unwrap_or(d.nx),
        cfg.ny.unwrap_or(d.ny),
    );
    g.validate()?;
    Ok(g)
}

/// One mesh of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshRecord {
    pub mesh: SurfaceMesh,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psph_gauge: Option<Vec<Option<PsphGauge>>>,
}

/// Everything `check` needs to rerun diagnostics without solving again.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cache {
    pub version: String,
    pub config: JobConfig,
    pub meshes: Vec<MeshRecord>,
}

/// Diagnostics of one mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshDiagnostics {
    pub lambda0: f64,
    pub coverage: f64,
    pub big_cell_failures: usize,
    pub regularity_failures: usize,
    pub report: DiagnosticsReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub problem: Problem,
    pub case: String,
    pub pass: bool,
    pub meshes: Vec<MeshDiagnostics>,
}

impl RunDiagnostics {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagnostics are serializable")
    }

    /// Human-readable summary, one line per mesh and per check.
    pub fn summary(&self) -> String {
        let mut s = format!("problem {}, case {}\n", self.problem, self.case);
        for m in &self.meshes {
            s += &format!(
                "lambda {}: coverage {:.1}%, big-cell failures {}, regularity failures {}\n",
                m.lambda0,
                100.0 * m.coverage,
                m.big_cell_failures,
                m.regularity_failures
            );
            for c in &m.report.checks {
                s += &format!(
                    "  {} {:<24} max {:.3e}  mean {:.3e}  tol {:.1e}  ({} nodes, {} excluded){}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.max,
                    c.mean,
                    c.tolerance,
                    c.count,
                    c.excluded,
                    c.note.as_ref().map(|n| format!("  {n}")).unwrap_or_default()
                );
            }
        }
        s += if self.pass { "all diagnostics pass\n" } else { "diagnostics FAILED\n" };
        s
    }
}

/// The configured checks on one mesh. Boundary checks only apply at
/// `λ = 1`, where the mesh is the solution of the Cauchy problem itself.
pub fn diagnose(
    cfg: &JobConfig,
    data: &CurveData,
    pot: &CauchyPotential,
    rec: &MeshRecord,
    opts: &FrameOptions,
) -> Result<DiagnosticsReport> {
    let mesh = &rec.mesh;
    let t = cfg.tol;
    let mut r = DiagnosticsReport::default();
    if mesh.meta.lambda0 == 1.0 {
        r.extend(cauchy_residual(mesh, pot, data, opts, t.cauchy)?);
    }
    match mesh.meta.kind {
        SurfaceKind::Cmc => r.push(mean_curvature(mesh, t.mean_curvature).1),
        SurfaceKind::Psph => {
            r.push(gauss_curvature(mesh, t.gauss_curvature).1);
            if cfg.geodesic && mesh.meta.lambda0 == 1.0 {
                r.push(geodesic_residual(mesh, pot.curve_map, data, t.geodesic));
            }
            if let Some(g) = &rec.psph_gauge {
                let sg = SineGordonData {
                    grid: mesh.grid,
                    nodes: g.clone(),
                };
                let (a, b) = sine_gordon_residual(&sg, t.sine_gordon, t.codazzi);
                r.push(a);
                r.push(b);
            }
        }
    }
    Ok(r)
}

fn collect(cfg: &JobConfig, pot: &CauchyPotential, per_mesh: Vec<MeshDiagnostics>) -> RunDiagnostics {
    RunDiagnostics {
        problem: cfg.problem,
        case: pot.case().name().to_string(),
        pass: per_mesh.iter().all(|m| m.report.pass()),
        meshes: per_mesh,
    }
}

fn mesh_diagnostics(rec: &MeshRecord, report: DiagnosticsReport) -> MeshDiagnostics {
    MeshDiagnostics {
        lambda0: rec.mesh.meta.lambda0,
        coverage: rec.mesh.coverage(),
        big_cell_failures: rec.mesh.meta.big_cell_failures,
        regularity_failures: rec.mesh.meta.regularity_failures,
        report,
    }
}

fn with_suffix(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Output files for mesh `k` of `n`.
pub fn mesh_paths(out: &Path, k: usize, n: usize) -> (PathBuf, PathBuf) {
    let stem = if n == 1 { String::new() } else { format!("-l{k}") };
    (
        with_suffix(out, &format!("{stem}.obj")),
        with_suffix(out, &format!("{stem}.csv")),
    )
}

pub fn diagnostics_path(out: &Path) -> PathBuf {
    with_suffix(out, ".diagnostics.json")
}

pub fn cache_path(out: &Path) -> PathBuf {
    with_suffix(out, ".cache.json")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Solve, export and diagnose.
pub fn run(cfg: &JobConfig) -> Result<RunDiagnostics> {
    let (data, pot) = prepare(cfg)?;
    let grid = grid_for(cfg, &data, &pot, cfg.n)?;
    let opts = cfg.frame_options();
    let mut records = Vec::new();
    let mut per_mesh = Vec::new();
    for &lambda0 in &cfg.lambda {
        let s = solve(&pot, &grid, &opts, lambda0)?;
        let rec = MeshRecord {
            mesh: s.mesh,
            psph_gauge: s.psph_gauge,
        };
        let report = diagnose(cfg, &data, &pot, &rec, &opts)?;
        per_mesh.push(mesh_diagnostics(&rec, report));
        records.push(rec);
    }
    let n = records.len();
    for (k, rec) in records.iter().enumerate() {
        let (obj, csv) = mesh_paths(&cfg.out, k, n);
        if cfg.obj {
            let mut w = create(&obj)?;
            write_obj(&rec.mesh, &mut w)?;
            w.flush()?;
        }
        if cfg.csv {
            let mut w = create(&csv)?;
            write_csv(&rec.mesh, &mut w)?;
            w.flush()?;
        }
    }
    let diag = collect(cfg, &pot, per_mesh);
    let mut w = create(&diagnostics_path(&cfg.out))?;
    w.write_all(diag.to_json().as_bytes())?;
    w.flush()?;
    let cache = Cache {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        meshes: records,
    };
    let mut w = create(&cache_path(&cfg.out))?;
    serde_json::to_writer(&mut w, &cache).map_err(|e| Error::Io(e.to_string()))?;
    w.flush()?;
    Ok(diag)
}

pub fn load_cache(out: &Path) -> Result<Cache> {
    let path = cache_path(out);
    let f = File::open(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(f))
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Rerun diagnostics on the artifacts of an earlier run with output prefix
/// `out`. Mesh CSVs, when present, take precedence over the cached meshes.
pub fn check(out: &Path) -> Result<RunDiagnostics> {
    let cache = load_cache(out)?;
    let cfg = &cache.config;
    let (data, pot) = prepare(cfg)?;
    let opts = cfg.frame_options();
    let n = cache.meshes.len();
    let mut per_mesh = Vec::new();
    for (k, mut rec) in cache.meshes.clone().into_iter().enumerate() {
        let (_, csv) = mesh_paths(out, k, n);
        if csv.exists() {
            let f = File::open(&csv)?;
            read_csv_into(&mut rec.mesh, BufReader::new(f))?;
        }
        let report = diagnose(cfg, &data, &pot, &rec, &opts)?;
        per_mesh.push(mesh_diagnostics(&rec, report));
    }
    Ok(collect(cfg, &pot, per_mesh))
}

/// Diagnostics at `λ = 1` over a sequence of grid sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub sizes: Vec<usize>,
    pub reports: Vec<DiagnosticsReport>,
}

impl Sweep {
    /// Observed order between consecutive sizes: `log(e₁/e₂)/log(h₁/h₂)`.
    pub fn rates(&self, name: &str) -> Vec<Option<f64>> {
        let maxes: Vec<Option<f64>> = self
            .reports
            .iter()
            .map(|r| r.get(name).map(|c| c.max))
            .collect();
        (1..self.sizes.len())
            .map(|k| {
                let (a, b) = (maxes[k - 1]?, maxes[k]?);
                let h = (self.sizes[k] - 1) as f64 / (self.sizes[k - 1] - 1) as f64;
                (a > 0.0 && b > 0.0).then(|| (a / b).ln() / h.ln())
            })
            .collect()
    }

    pub fn table(&self) -> String {
        let mut s = format!("{:<24}", "check");
        for n in &self.sizes {
            s += &format!(" {:>12}", format!("n={n}"));
        }
        s += "  rates\n";
        let names: Vec<&str> = self.reports[0].checks.iter().map(|c| c.name.as_str()).collect();
        for name in names {
            s += &format!("{name:<24}");
            for r in &self.reports {
                match r.get(name) {
                    Some(c) => s += &format!(" {:>12.3e}", c.max),
                    None => s += &format!(" {:>12}", "-"),
                }
            }
            let rates: Vec<String> = self
                .rates(name)
                .into_iter()
                .map(|r| r.map_or("-".into(), |r| format!("{r:.2}")))
                .collect();
            s += &format!("  {}\n", rates.join(" "));
        }
        s
    }

    pub fn pass(&self) -> bool {
        self.reports.last().is_some_and(|r| r.pass())
    }
}

/// Solve at each size and diagnose; nothing is written.
pub fn sweep(cfg: &JobConfig, sizes: &[usize]) -> Result<Sweep> {
    if sizes.len() < 2 {
        return Err(Error::Config("a sweep needs at least two grid sizes".into()));
    }
    let (data, pot) = prepare(cfg)?;
    let opts = cfg.frame_options();
    let mut reports = Vec::new();
    for &n in sizes {
        let mut c = cfg.clone();
        c.nx = None;
        c.ny = None;
        let grid = grid_for(&c, &data, &pot, n)?;
        let s = solve(&pot, &grid, &opts, 1.0)?;
        let rec = MeshRecord {
            mesh: s.mesh,
            psph_gauge: s.psph_gauge,
        };
        reports.push(diagnose(cfg, &data, &pot, &rec, &opts)?);
    }
    Ok(Sweep {
        sizes: sizes.to_vec(),
        reports,
    })
}

#[cfg(test)]
mod tests;
