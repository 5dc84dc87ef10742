//! Lie-algebra kernels: the identifications 𝕃³ ≅ sl(2,ℝ) and 𝔼³ ≅ su(2),
//! inner and cross products, adjoint actions, and the spin lift of frame paths.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::conventions::{EUCLID_BRACKET, EUCLID_SIGNATURE, LORENTZ_BRACKET, LORENTZ_SIGNATURE};
use crate::error::{Error, Result};
use crate::mat2::{c, re, Mat2};

/// Orthonormality defect accepted as-is.
pub const ORTHONORMAL_TOL: f64 = 1e-8;
/// Defect up to which a frame is repaired by Gram–Schmidt instead of rejected.
pub const ORTHONORMAL_REPAIR_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealForm {
    /// SL(2,ℝ) twisted loops: real Laurent coefficients.
    Split,
    /// SU(2) twisted loops: `γ(λ) γ(λ̄)† = I`.
    Unitary,
}

/// A vector of the ambient space together with its matrix model.
pub trait AmbientVector:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
{
    const FORM: RealForm;
    const SIGNATURE: [f64; 3];
    const BRACKET: f64;

    fn from_coords(c: [f64; 3]) -> Self;
    fn coords(&self) -> [f64; 3];
    fn to_matrix(&self) -> Mat2;
    fn from_matrix(m: &Mat2) -> Self;
    fn ip(&self, other: &Self) -> f64;
    fn cross(&self, other: &Self) -> Self;

    fn basis(i: usize) -> Self {
        let mut c = [0.0; 3];
        c[i] = 1.0;
        Self::from_coords(c)
    }

    fn zero() -> Self {
        Self::from_coords([0.0; 3])
    }

    fn norm_sqr(&self) -> f64 {
        self.ip(self)
    }

    /// Euclidean length of the coordinate triple, used for error measures.
    fn coord_norm(&self) -> f64 {
        let c = self.coords();
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    }
}

/// Vector of 𝕃³ in the basis (e0, e1, e2), signature (−,+,+).
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3L {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
}

impl Vec3L {
    pub const fn new(t: f64, x1: f64, x2: f64) -> Self {
        Vec3L { t, x1, x2 }
    }
}

/// Vector of 𝔼³ in the basis (e1, e2, e3) of su(2).
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3E {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3E {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3E { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

macro_rules! vec_ops {
    ($t:ident, $a:ident, $b:ident, $c:ident) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                $t::new(self.$a + o.$a, self.$b + o.$b, self.$c + o.$c)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                $t::new(self.$a - o.$a, self.$b - o.$b, self.$c - o.$c)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                $t::new(-self.$a, -self.$b, -self.$c)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t {
                $t::new(self.$a * s, self.$b * s, self.$c * s)
            }
        }
    };
}

vec_ops!(Vec3L, t, x1, x2);
vec_ops!(Vec3E, x, y, z);

fn cross_coords(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl AmbientVector for Vec3L {
    const FORM: RealForm = RealForm::Split;
    const SIGNATURE: [f64; 3] = LORENTZ_SIGNATURE;
    const BRACKET: f64 = LORENTZ_BRACKET;

    fn from_coords(c: [f64; 3]) -> Self {
        Vec3L::new(c[0], c[1], c[2])
    }

    fn coords(&self) -> [f64; 3] {
        [self.t, self.x1, self.x2]
    }

    fn to_matrix(&self) -> Mat2 {
        // t e0 + x1 e1 + x2 e2
        Mat2::real(-self.x2, self.x1 - self.t, self.x1 + self.t, self.x2)
    }

    fn from_matrix(m: &Mat2) -> Self {
        let (a, b, cc, d) = (
            m.get(0, 0).re,
            m.get(0, 1).re,
            m.get(1, 0).re,
            m.get(1, 1).re,
        );
        Vec3L::new(0.5 * (cc - b), 0.5 * (b + cc), 0.5 * (d - a))
    }

    fn ip(&self, o: &Self) -> f64 {
        ip_l3(*self, *o)
    }

    /// Minkowski cross product, characterized by `⟨u×v, w⟩ = det[u v w]`.
    fn cross(&self, o: &Self) -> Self {
        let e = cross_coords(self.coords(), o.coords());
        Vec3L::new(-e[0], e[1], e[2])
    }
}

impl AmbientVector for Vec3E {
    const FORM: RealForm = RealForm::Unitary;
    const SIGNATURE: [f64; 3] = EUCLID_SIGNATURE;
    const BRACKET: f64 = EUCLID_BRACKET;

    fn from_coords(c: [f64; 3]) -> Self {
        Vec3E::new(c[0], c[1], c[2])
    }

    fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn to_matrix(&self) -> Mat2 {
        // ½ [[i z, i x − y], [i x + y, −i z]]
        Mat2::new(
            c(0.0, 0.5 * self.z),
            c(-0.5 * self.y, 0.5 * self.x),
            c(0.5 * self.y, 0.5 * self.x),
            c(0.0, -0.5 * self.z),
        )
    }

    fn from_matrix(m: &Mat2) -> Self {
        let b = m.get(0, 1);
        let cc = m.get(1, 0);
        Vec3E::new((b + cc).im, (cc - b).re, 2.0 * m.get(0, 0).im)
    }

    fn ip(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn cross(&self, o: &Self) -> Self {
        Vec3E::from_coords(cross_coords(self.coords(), o.coords()))
    }
}

/// Minkowski inner product `−u_t v_t + u₁v₁ + u₂v₂`.
pub fn ip_l3(u: Vec3L, v: Vec3L) -> f64 {
    -u.t * v.t + u.x1 * v.x1 + u.x2 * v.x2
}

/// Cross product in the given ambient form.
pub fn cross<V: AmbientVector>(u: V, v: V) -> V {
    u.cross(&v)
}

/// Coordinate determinant `det[u v w]`.
pub fn det3<V: AmbientVector>(u: V, v: V, w: V) -> f64 {
    let (a, b, c) = (u.coords(), v.coords(), w.coords());
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// A 2×2 group element tagged with its real form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement2 {
    pub m: Mat2,
    pub form: RealForm,
}

impl GroupElement2 {
    pub const TOL: f64 = 1e-8;

    pub fn identity(form: RealForm) -> Self {
        GroupElement2 {
            m: Mat2::IDENTITY,
            form,
        }
    }

    /// Validates det = 1 and the real-form condition.
    pub fn new(m: Mat2, form: RealForm) -> Result<Self> {
        let det_err = (m.det() - re(1.0)).norm();
        if det_err > Self::TOL {
            return Err(Error::FormMismatch(format!("|det - 1| = {det_err:.3e}")));
        }
        match form {
            RealForm::Split => {
                if m.max_imag() > Self::TOL {
                    return Err(Error::FormMismatch(
                        "split element has complex entries".into(),
                    ));
                }
            }
            RealForm::Unitary => {
                let d = (m.adjoint() * m - Mat2::IDENTITY).norm();
                if d > Self::TOL {
                    return Err(Error::FormMismatch(format!(
                        "M†M deviates from I by {d:.3e}"
                    )));
                }
            }
        }
        Ok(GroupElement2 { m, form })
    }

    pub fn inverse(&self) -> Self {
        GroupElement2 {
            m: self.m.inverse(),
            form: self.form,
        }
    }
}

/// `Ad_g v = g M_v g⁻¹`, mapped back to vector form.
pub fn ad<V: AmbientVector>(g: &GroupElement2, v: V) -> Result<V> {
    if g.form != V::FORM {
        return Err(Error::FormMismatch(format!(
            "group element is {:?}, vector needs {:?}",
            g.form,
            V::FORM
        )));
    }
    Ok(ad_matrix(&g.m, v))
}

/// Adjoint action by a raw matrix; no form check.
#[inline]
pub fn ad_matrix<V: AmbientVector>(g: &Mat2, v: V) -> V {
    V::from_matrix(&(*g * v.to_matrix() * g.inverse()))
}

/// Ordered orthonormal frame: images of the model basis vectors.
pub type Frame3<V> = [V; 3];

/// Largest deviation of the Gram matrix from the model signature.
pub fn orthonormal_defect<V: AmbientVector>(f: &Frame3<V>) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { V::SIGNATURE[i] } else { 0.0 };
            d = d.max((f[i].ip(&f[j]) - want).abs());
        }
    }
    d
}

/// Accept, repair (Gram–Schmidt) or reject an ingested frame.
pub fn check_frame<V: AmbientVector>(f: &Frame3<V>) -> Result<Frame3<V>> {
    let defect = orthonormal_defect(f);
    if defect <= ORTHONORMAL_TOL {
        return Ok(*f);
    }
    if defect > ORTHONORMAL_REPAIR_TOL {
        return Err(Error::NotOrthonormal { defect });
    }
    let mut out = *f;
    for i in 0..3 {
        let mut v = f[i];
        for j in 0..i {
            v = v - out[j] * (v.ip(&out[j]) / V::SIGNATURE[j]);
        }
        out[i] = v * (1.0 / v.norm_sqr().abs().sqrt());
    }
    Ok(out)
}

/// Maurer–Cartan vector `X = F⁻¹F'` (model coordinates) of the spin lift of a
/// frame path, read off from the frame and its derivative.
///
/// With `E_j' = Ad_F [X, e_j]` one gets `⟨E_i, E_j'⟩ = κ det[X, e_j, e_i]`, κ the
/// bracket factor, which yields each coordinate of `X` from one connection
/// coefficient.
pub fn frame_connection<V: AmbientVector>(frame: &Frame3<V>, dframe: &Frame3<V>) -> V {
    let k = V::BRACKET;
    V::from_coords([
        frame[2].ip(&dframe[1]) / k,
        frame[0].ip(&dframe[2]) / k,
        frame[1].ip(&dframe[0]) / k,
    ])
}

/// Spin lift of a frame path by integrating `F' = F μ(R⁻¹R')` with RK4 from `t0`.
///
/// `path(t)` returns the frame and its derivative. Output is `F(t)` at every
/// point of `ts` (any order, either side of `t0`), with `F(t0) = init`.
pub fn lift_frame_path<V, P>(
    path: P,
    t0: f64,
    ts: &[f64],
    init: &GroupElement2,
    steps_per_unit: usize,
) -> Result<Vec<GroupElement2>>
where
    V: AmbientVector,
    P: Fn(f64) -> (Frame3<V>, Frame3<V>),
{
    if init.form != V::FORM {
        return Err(Error::FormMismatch(
            "initial element has the wrong real form".into(),
        ));
    }
    let generator = |t: f64| -> Result<Mat2> {
        let (r, dr) = path(t);
        let r = check_frame(&r)?;
        Ok(frame_connection(&r, &dr).to_matrix())
    };
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let span = t - t0;
        let n = ((span.abs() * steps_per_unit as f64).ceil() as usize).max(1);
        let h = span / n as f64;
        let mut f = init.m;
        let mut s = t0;
        for _ in 0..n {
            let k1 = f * generator(s)?;
            let k2 = (f + k1 * (0.5 * h)) * generator(s + 0.5 * h)?;
            let k3 = (f + k2 * (0.5 * h)) * generator(s + 0.5 * h)?;
            let k4 = (f + k3 * h) * generator(s + h)?;
            f = f + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            f = f.normalize_det();
            s += h;
        }
        if V::FORM == RealForm::Split {
            // strip round-off imaginary parts
            let [[a, b], [cc, d]] = f.0;
            f = Mat2::real(a.re, b.re, cc.re, d.re);
        }
        out.push(GroupElement2 {
            m: f,
            form: V::FORM,
        });
    }
    Ok(out)
}
