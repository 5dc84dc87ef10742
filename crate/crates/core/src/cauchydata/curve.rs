//! Curve data: a parameterized curve with a prescribed vector field along it,
//! with first and second derivatives of both.

use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{jv_deriv, jv_dot_e, jv_nth, jv_scale, jv_sub, Jet, JetVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    /// Minkowski space, coordinates `(t, x1, x2)`.
    Lorentz,
    Euclid,
}

/// Meaning of the prescribed field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// Transverse derivative `V` of a CMC surface along the curve.
    Velocity,
    /// Unit normal `N₀` of a K-surface along the curve.
    Normal,
}

/// Curve and field with derivatives at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CurvePoint {
    pub t: f64,
    pub pos: [f64; 3],
    pub d1: [f64; 3],
    pub d2: [f64; 3],
    pub field: [f64; 3],
    pub field_d1: [f64; 3],
    pub field_d2: [f64; 3],
}

impl CurvePoint {
    /// Position and field as jets in `t` (exact through the second
    /// derivative; higher orders are zero).
    pub fn jets(&self) -> (JetVec, JetVec) {
        let mk = |v: [f64; 3], d1: [f64; 3], d2: [f64; 3]| -> JetVec {
            [0, 1, 2].map(|k| Jet::from_derivatives(&[v[k], d1[k], d2[k]]))
        };
        (
            mk(self.pos, self.d1, self.d2),
            mk(self.field, self.field_d1, self.field_d2),
        )
    }
}

pub type CurveFn = Arc<dyn Fn(f64) -> CurvePoint + Send + Sync>;

/// A curve with prescribed field, evaluable anywhere on its domain.
#[derive(Clone)]
pub struct CurveData {
    pub name: String,
    pub ambient: Ambient,
    pub field_kind: FieldKind,
    pub domain: (f64, f64),
    /// Base parameter where the frame is normalized.
    pub t0: f64,
    /// `true` when derivatives come from an analytic expression.
    pub analytic: bool,
    eval: CurveFn,
}

impl fmt::Debug for CurveData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveData")
            .field("name", &self.name)
            .field("ambient", &self.ambient)
            .field("field_kind", &self.field_kind)
            .field("domain", &self.domain)
            .field("t0", &self.t0)
            .finish()
    }
}

impl CurveData {
    pub fn new(
        name: impl Into<String>,
        ambient: Ambient,
        field_kind: FieldKind,
        domain: (f64, f64),
        eval: CurveFn,
    ) -> Self {
        let t0 = if domain.0 <= 0.0 && 0.0 <= domain.1 {
            0.0
        } else {
            0.5 * (domain.0 + domain.1)
        };
        CurveData {
            name: name.into(),
            ambient,
            field_kind,
            domain,
            t0,
            analytic: true,
            eval,
        }
    }

    /// Curve given by jet-valued position and field maps.
    pub fn from_jets<P, F>(
        name: impl Into<String>,
        ambient: Ambient,
        field_kind: FieldKind,
        domain: (f64, f64),
        pos: P,
        field: F,
    ) -> Self
    where
        P: Fn(Jet) -> JetVec + Send + Sync + 'static,
        F: Fn(Jet) -> JetVec + Send + Sync + 'static,
    {
        let eval = move |t: f64| {
            let x = Jet::variable(t);
            let p = pos(x);
            let v = field(x);
            CurvePoint {
                t,
                pos: jv_nth(&p, 0),
                d1: jv_nth(&p, 1),
                d2: jv_nth(&p, 2),
                field: jv_nth(&v, 0),
                field_d1: jv_nth(&v, 1),
                field_d2: jv_nth(&v, 2),
            }
        };
        Self::new(name, ambient, field_kind, domain, Arc::new(eval))
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_domain(mut self, domain: (f64, f64)) -> Self {
        self.domain = domain;
        if !(domain.0..=domain.1).contains(&self.t0) {
            self.t0 = 0.5 * (domain.0 + domain.1);
        }
        self
    }

    pub fn point(&self, t: f64) -> CurvePoint {
        (self.eval)(t)
    }

    pub fn evaluator(&self) -> CurveFn {
        self.eval.clone()
    }

    /// `n` uniformly spaced parameter samples over the domain.
    pub fn sample_ts(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.domain;
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn samples(&self, n: usize) -> Vec<CurvePoint> {
        self.sample_ts(n).into_iter().map(|t| self.point(t)).collect()
    }
}

/// Principal unit normal of a Euclidean curve, in jet arithmetic.
pub fn principal_normal(pos: &JetVec) -> JetVec {
    let d1 = jv_deriv(pos);
    let d2 = jv_deriv(&d1);
    let speed2 = jv_dot_e(&d1, &d1);
    let along = jv_dot_e(&d2, &d1) / speed2;
    let n = jv_sub(&d2, &jv_scale(&d1, along));
    let len = jv_dot_e(&n, &n).sqrt();
    jv_scale(&n, len.recip())
}

// ---- sampled curves ----------------------------------------------------

/// 4th-order finite-difference derivative weights (first, second) at sample
/// `i` of `n`, as `(offset, w1, w2)` with weights to be divided by `12h` and
/// `12h²`.
fn fd_weights(i: usize, n: usize) -> (isize, [f64; 6], [f64; 6]) {
    const C1: [f64; 6] = [1.0, -8.0, 0.0, 8.0, -1.0, 0.0];
    const C2: [f64; 6] = [-1.0, 16.0, -30.0, 16.0, -1.0, 0.0];
    const S1_0: [f64; 6] = [-25.0, 48.0, -36.0, 16.0, -3.0, 0.0];
    const S2_0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
    const S1_1: [f64; 6] = [-3.0, -10.0, 18.0, -6.0, 1.0, 0.0];
    const S2_1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
    let neg = |w: [f64; 6]| w.map(|x| -x);
    let rev = |w: [f64; 6]| [w[5], w[4], w[3], w[2], w[1], w[0]];
    if i == 0 {
        (0, S1_0, S2_0)
    } else if i == 1 {
        (-1, S1_1, S2_1)
    } else if i + 2 >= n {
        // mirrored one-sided stencils on the last six samples
        let (w1, w2) = if i + 1 == n { (S1_0, S2_0) } else { (S1_1, S2_1) };
        let start = n as isize - 6 - i as isize;
        (start, neg(rev(w1)), rev(w2))
    } else {
        (-2, C1, C2)
    }
}

/// Derivatives of uniformly sampled vector data, 4th order accurate.
pub fn differentiate(values: &[[f64; 3]], h: f64) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let n = values.len();
    let mut d1 = vec![[0.0; 3]; n];
    let mut d2 = vec![[0.0; 3]; n];
    for i in 0..n {
        let (off, w1, w2) = fd_weights(i, n);
        for (k, (a, b)) in w1.iter().zip(&w2).enumerate() {
            let idx = i as isize + off + k as isize;
            if idx < 0 || idx >= n as isize {
                continue;
            }
            let v = values[idx as usize];
            for c in 0..3 {
                d1[i][c] += a * v[c];
                d2[i][c] += b * v[c];
            }
        }
        for c in 0..3 {
            d1[i][c] /= 12.0 * h;
            d2[i][c] /= 12.0 * h * h;
        }
    }
    (d1, d2)
}

/// Cubic Lagrange interpolation of uniformly sampled points.
fn interpolate(points: &[CurvePoint], t0: f64, h: f64, t: f64) -> CurvePoint {
    let n = points.len();
    let s = (t - t0) / h;
    let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let mut w = [0.0; 4];
    for (a, wa) in w.iter_mut().enumerate() {
        let xa = (base + a) as f64;
        *wa = (0..4)
            .filter(|&b| b != a)
            .map(|b| (s - (base + b) as f64) / (xa - (base + b) as f64))
            .product();
    }
    let mix = |get: fn(&CurvePoint) -> [f64; 3]| {
        let mut out = [0.0; 3];
        for (a, wa) in w.iter().enumerate() {
            let v = get(&points[base + a]);
            for c in 0..3 {
                out[c] += wa * v[c];
            }
        }
        out
    };
    CurvePoint {
        t,
        pos: mix(|p| p.pos),
        d1: mix(|p| p.d1),
        d2: mix(|p| p.d2),
        field: mix(|p| p.field),
        field_d1: mix(|p| p.field_d1),
        field_d2: mix(|p| p.field_d2),
    }
}

/// Sampled curve and field; how to fill a missing field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldFill {
    /// The CSV must carry `vx,vy,vz`.
    Required,
    /// Use the principal normal (Euclidean curves only).
    PrincipalNormal,
}

/// Build curve data from uniform samples of position and optionally field.
pub fn curve_from_samples(
    name: impl Into<String>,
    ambient: Ambient,
    field_kind: FieldKind,
    ts: &[f64],
    pos: &[[f64; 3]],
    field: Option<&[[f64; 3]]>,
) -> Result<CurveData> {
    let n = ts.len();
    if n < 9 {
        return Err(Error::Curve(format!("need at least 9 samples, got {n}")));
    }
    let h = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::Curve("parameter must be increasing".into()));
    }
    for (i, &t) in ts.iter().enumerate() {
        let want = ts[0] + h * i as f64;
        if (t - want).abs() > 1e-9 * (1.0 + want.abs()) {
            return Err(Error::Curve(format!(
                "non-uniform parameter grid at row {} (t = {t})",
                i + 1
            )));
        }
    }
    let (d1, d2) = differentiate(pos, h);
    let field: Vec<[f64; 3]> = match field {
        Some(f) => f.to_vec(),
        None => {
            if ambient != Ambient::Euclid {
                return Err(Error::Curve("field columns vx,vy,vz are required".into()));
            }
            (0..n)
                .map(|i| {
                    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                    let s = dot(d2[i], d1[i]) / dot(d1[i], d1[i]);
                    let v = [0, 1, 2].map(|c| d2[i][c] - s * d1[i][c]);
                    let l = dot(v, v).sqrt();
                    v.map(|x| x / l)
                })
                .collect()
        }
    };
    let (f1, f2) = differentiate(&field, h);
    let points: Vec<CurvePoint> = (0..n)
        .map(|i| CurvePoint {
            t: ts[i],
            pos: pos[i],
            d1: d1[i],
            d2: d2[i],
            field: field[i],
            field_d1: f1[i],
            field_d2: f2[i],
        })
        .collect();
    let t_start = ts[0];
    let eval = Arc::new(move |t: f64| interpolate(&points, t_start, h, t));
    let mut data = CurveData::new(name, ambient, field_kind, (ts[0], ts[n - 1]), eval);
    data.analytic = false;
    Ok(data)
}

/// Parse a curve CSV: header `t,fx,fy,fz[,vx,vy,vz]`.
pub fn read_curve_csv<R: BufRead>(
    reader: R,
    name: &str,
    ambient: Ambient,
    field_kind: FieldKind,
    fill: FieldFill,
) -> Result<CurveData> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Curve("empty CSV".into()))?;
    let header = header?;
    let cols: Vec<&str> = header.split(',').map(|s| s.trim()).collect();
    let with_field = match cols.as_slice() {
        ["t", "fx", "fy", "fz"] => false,
        ["t", "fx", "fy", "fz", "vx", "vy", "vz"] => true,
        _ => {
            return Err(Error::Curve(format!(
                "bad header '{header}', expected t,fx,fy,fz[,vx,vy,vz]"
            )))
        }
    };
    if !with_field && fill == FieldFill::Required {
        return Err(Error::Curve("CSV has no field columns vx,vy,vz".into()));
    }
    let mut ts = Vec::new();
    let mut pos = Vec::new();
    let mut field = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Curve(format!("line {}: {e}", lineno + 1)))?;
        if vals.len() != cols.len() {
            return Err(Error::Curve(format!(
                "line {}: expected {} fields, got {}",
                lineno + 1,
                cols.len(),
                vals.len()
            )));
        }
        ts.push(vals[0]);
        pos.push([vals[1], vals[2], vals[3]]);
        if with_field {
            field.push([vals[4], vals[5], vals[6]]);
        }
    }
    curve_from_samples(
        name,
        ambient,
        field_kind,
        &ts,
        &pos,
        with_field.then_some(field.as_slice()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_csv(n: usize, h: f64) -> String {
        let mut s = String::from("t,fx,fy,fz,vx,vy,vz\n");
        for i in 0..n {
            let t = -1.0 + h * i as f64;
            s += &format!(
                "{t},{},{},0,{},{},0\n",
                t.cos(),
                t.sin(),
                -t.cos(),
                -t.sin()
            );
        }
        s
    }

    fn max_err(c: &CurveData) -> f64 {
        let mut e: f64 = 0.0;
        for t in c.sample_ts(37) {
            let p = c.point(t);
            let want_d1 = [-t.sin(), t.cos(), 0.0];
            let want_d2 = [-t.cos(), -t.sin(), 0.0];
            for k in 0..3 {
                e = e.max((p.d1[k] - want_d1[k]).abs());
                e = e.max((p.d2[k] - want_d2[k]).abs());
                e = e.max((p.field_d1[k] + want_d1[k]).abs());
            }
        }
        e
    }

    #[test]
    fn csv_circle_derivatives_are_fourth_order() {
        let read = |n: usize| {
            let h = 2.0 / (n - 1) as f64;
            let s = circle_csv(n, h);
            read_curve_csv(
                s.as_bytes(),
                "circle",
                Ambient::Euclid,
                FieldKind::Normal,
                FieldFill::Required,
            )
            .unwrap()
        };
        let e1 = max_err(&read(41));
        let e2 = max_err(&read(81));
        assert!(e1 < 1e-4, "{e1}");
        let rate = (e1 / e2).log2();
        assert!(rate > 3.5, "rate {rate}");
    }

    #[test]
    fn csv_errors() {
        let bad = "t,fx,fy\n0,1,2\n";
        assert!(read_curve_csv(bad.as_bytes(), "x", Ambient::Euclid, FieldKind::Normal, FieldFill::PrincipalNormal).is_err());
        let few = circle_csv(5, 0.1);
        assert!(read_curve_csv(few.as_bytes(), "x", Ambient::Euclid, FieldKind::Normal, FieldFill::Required).is_err());
        let mut skew = circle_csv(12, 0.1);
        skew = skew.replacen("-0.9,", "-0.85,", 1);
        let r = read_curve_csv(skew.as_bytes(), "x", Ambient::Euclid, FieldKind::Normal, FieldFill::Required);
        assert!(matches!(r, Err(Error::Curve(m)) if m.contains("non-uniform")));
        let nofield = "t,fx,fy,fz\n".to_string()
            + &(0..10).map(|i| format!("{i},{i},0,0\n")).collect::<String>();
        assert!(read_curve_csv(nofield.as_bytes(), "x", Ambient::Lorentz, FieldKind::Velocity, FieldFill::Required).is_err());
    }

    #[test]
    fn principal_normal_of_parabola() {
        let t = 0.7;
        let p = [Jet::variable(t), Jet::variable(t) * Jet::variable(t), Jet::constant(0.0)];
        let n = principal_normal(&p);
        // (2t, −1, 0)/√(1+4t²), up to orientation: the curve bends toward +y
        let s = (1.0 + 4.0 * t * t).sqrt();
        let want = [-2.0 * t / s, 1.0 / s, 0.0];
        for k in 0..3 {
            assert!((n[k].value() - want[k]).abs() < 1e-14);
        }
        // derivative (1+4t²)^{-3/2}(2, 4t, 0) with the sign flipped
        let w = s.powi(-3);
        assert!((n[0].nth(1) + 2.0 * w).abs() < 1e-13);
        assert!((n[1].nth(1) + 4.0 * t * w).abs() < 1e-13);
    }
}
