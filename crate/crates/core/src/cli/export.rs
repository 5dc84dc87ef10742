//! Mesh export: OBJ and CSV.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::surface::SurfaceMesh;

/// C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: &str = "x,y,u,v,fx,fy,fz,nx,ny,nz,mask";

/// One row per node, in node index order.
pub fn write_csv<W: Write>(mesh: &SurfaceMesh, mut w: W) -> Result<()> {
    let (xs, ys) = (mesh.grid.xs(), mesh.grid.ys());
    writeln!(w, "{CSV_HEADER}")?;
    for idx in 0..mesh.grid.len() {
        let (i, j) = mesh.grid.coords(idx);
        let (x, y) = (xs[i], ys[j]);
        let mut cols = vec![x, y, 0.5 * (x - y), 0.5 * (x + y)];
        cols.extend(mesh.positions[idx]);
        cols.extend(mesh.normals[idx]);
        let row: Vec<String> = cols.into_iter().map(fmt_g17).collect();
        writeln!(w, "{},{}", row.join(","), u8::from(mesh.mask[idx]))?;
    }
    Ok(())
}

/// Replace positions, normals and mask of `mesh` by those in a CSV written by
/// [`write_csv`] for the same grid.
pub fn read_csv_into<R: BufRead>(mesh: &mut SurfaceMesh, r: R) -> Result<()> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != CSV_HEADER {
        return Err(Error::Config(format!("unexpected mesh CSV header '{header}'")));
    }
    let n = mesh.grid.len();
    let mut count = 0;
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if count >= n {
            return Err(Error::Config("mesh CSV has more rows than the grid".into()));
        }
        let bad = |what: &str| Error::Config(format!("mesh CSV line {}: {what}", k + 2));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(bad("expected 11 columns"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bad number"));
        for c in 0..3 {
            mesh.positions[count][c] = num(f[4 + c])?;
            mesh.normals[count][c] = num(f[7 + c])?;
        }
        mesh.mask[count] = match f[10].trim() {
            "1" => true,
            "0" => false,
            _ => return Err(bad("mask must be 0 or 1")),
        };
        count += 1;
    }
    if count != n {
        return Err(Error::Config(format!("mesh CSV has {count} rows, grid has {n}")));
    }
    Ok(())
}

/// Unmasked nodes become vertices with normals; quads with four unmasked
/// corners become faces.
pub fn write_obj<W: Write>(mesh: &SurfaceMesh, mut w: W) -> Result<()> {
    let g = mesh.grid;
    let mut vid = vec![0usize; g.len()];
    let mut next = 1;
    for idx in 0..g.len() {
        if mesh.mask[idx] {
            let [x, y, z] = mesh.positions[idx];
            writeln!(w, "v {} {} {}", fmt_g17(x), fmt_g17(y), fmt_g17(z))?;
            vid[idx] = next;
            next += 1;
        }
    }
    for idx in 0..g.len() {
        if mesh.mask[idx] {
            let [x, y, z] = mesh.normals[idx];
            writeln!(w, "vn {} {} {}", fmt_g17(x), fmt_g17(y), fmt_g17(z))?;
        }
    }
    for i in 0..g.nx.saturating_sub(1) {
        for j in 0..g.ny.saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].map(|(a, b)| g.index(a, b));
            if corners.iter().all(|&c| mesh.mask[c]) {
                let [a, b, c, d] = corners.map(|c| vid[c]);
                writeln!(w, "f {a}//{a} {b}//{b} {c}//{c} {d}//{d}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchydata::Ambient;
    use crate::framegen::{GridSpec, SurfaceKind};
    use crate::surface::MeshMeta;

    #[test]
    fn g17_matches_c() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (6.02e23, "6.02e+23"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g17(x), s, "{x:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, -1e-300, 7.0e200, 0.1 + 0.2, f64::MIN_POSITIVE] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    fn small_mesh() -> SurfaceMesh {
        let grid = GridSpec::new((0.0, 1.0), (0.0, 1.0), 3, 3);
        let n = grid.len();
        let mut mask = vec![true; n];
        mask[grid.index(2, 2)] = false;
        SurfaceMesh {
            grid,
            ambient: Ambient::Euclid,
            positions: (0..n).map(|k| [k as f64, 0.5 * k as f64, 0.1]).collect(),
            normals: vec![[0.0, 0.0, 1.0]; n],
            mask,
            meta: MeshMeta {
                kind: SurfaceKind::Psph,
                case: None,
                target_curvature: -1.0,
                lambda0: 1.0,
                truncation: 16,
                samples: 128,
                steps_per_unit: 800,
                placement: None,
                curve_map: None,
                t0: None,
                base: (0.0, 0.0),
                big_cell_failures: 0,
                regularity_failures: 0,
            },
        }
    }

    #[test]
    fn obj_skips_masked_quads() {
        let mut out = Vec::new();
        write_obj(&small_mesh(), &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 8);
        assert_eq!(s.lines().filter(|l| l.starts_with("vn ")).count(), 8);
        assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 3);
    }

    #[test]
    fn csv_round_trips_exactly() {
        let mesh = small_mesh();
        let mut out = Vec::new();
        write_csv(&mesh, &mut out).unwrap();
        let mut back = mesh.clone();
        back.positions.iter_mut().for_each(|p| *p = [0.0; 3]);
        back.mask.iter_mut().for_each(|m| *m = true);
        read_csv_into(&mut back, &out[..]).unwrap();
        assert_eq!(back.positions, mesh.positions);
        assert_eq!(back.mask, mesh.mask);
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("0,0,0,0,0,0,0.10000000000000001,"));
    }

    #[test]
    fn csv_with_wrong_rows_is_rejected() {
        let mut mesh = small_mesh();
        let text = format!("{CSV_HEADER}\n0,0,0,0,1,2,3,0,0,1,1\n");
        assert!(read_csv_into(&mut mesh, text.as_bytes()).is_err());
    }
}
