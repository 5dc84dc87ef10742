//! Truncated Taylor arithmetic used to differentiate the catalog curves and the
//! frames built from them. A `Jet` carries `f(t0), f'(t0), f''(t0)/2!, ...`.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ORDER: usize = 4;
const LEN: usize = ORDER + 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable at `t`.
    pub fn variable(t: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = t;
        c[1] = 1.0;
        Jet { c }
    }

    /// Jet from ordinary derivatives `[f, f', f'', ...]`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        let mut c = [0.0; LEN];
        let mut fact = 1.0;
        for (k, v) in d.iter().take(LEN).enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            c[k] = v / fact;
        }
        Jet { c }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th ordinary derivative.
    pub fn nth(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * fact
    }

    /// The jet of the derivative; loses the top order.
    pub fn deriv(&self) -> Self {
        let mut c = [0.0; LEN];
        for k in 0..ORDER {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Jet { c }
    }

    pub fn recip(&self) -> Self {
        let a0 = self.c[0];
        let mut r = [0.0; LEN];
        r[0] = 1.0 / a0;
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|j| self.c[j] * r[k - j]).sum();
            r[k] = -s / a0;
        }
        Jet { c: r }
    }

    pub fn sqrt(&self) -> Self {
        let mut r = [0.0; LEN];
        r[0] = self.c[0].sqrt();
        for k in 1..LEN {
            let s: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (self.c[k] - s) / (2.0 * r[0]);
        }
        Jet { c: r }
    }

    /// (sin, cos) by the standard recurrence.
    pub fn sin_cos(&self) -> (Self, Self) {
        let mut s = [0.0; LEN];
        let mut co = [0.0; LEN];
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..LEN {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                ss += w * co[k - j];
                cc -= w * s[k - j];
            }
            s[k] = ss / k as f64;
            co[k] = cc / k as f64;
        }
        (Jet { c: s }, Jet { c: co })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn exp(&self) -> Self {
        let mut e = [0.0; LEN];
        e[0] = self.c[0].exp();
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    pub fn sinh(&self) -> Self {
        let e = self.exp();
        let m = (-*self).exp();
        (e - m) * 0.5
    }

    pub fn cosh(&self) -> Self {
        let e = self.exp();
        let m = (-*self).exp();
        (e + m) * 0.5
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut r = Jet::constant(1.0);
        for _ in 0..n {
            r = r * *self;
        }
        r
    }

    /// Real power for positive base.
    pub fn powf(&self, p: f64) -> Self {
        let a0 = self.c[0];
        let mut r = [0.0; LEN];
        r[0] = a0.powf(p);
        // r' a = p a' r  (J.C.P. Miller recurrence)
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += (p * j as f64 - (k - j) as f64) * self.c[j] * r[k - j];
            }
            r[k] = s / (k as f64 * a0);
        }
        Jet { c: r }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a -= b;
        }
        Jet { c }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        Jet { c }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a *= s;
        }
        Jet { c }
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, s: f64) -> Jet {
        let mut c = self.c;
        c[0] += s;
        Jet { c }
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, s: f64) -> Jet {
        self + (-s)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, s: f64) -> Jet {
        self * (1.0 / s)
    }
}

/// 3-vector of jets.
pub type JetVec = [Jet; 3];

pub fn jv_const(v: [f64; 3]) -> JetVec {
    [
        Jet::constant(v[0]),
        Jet::constant(v[1]),
        Jet::constant(v[2]),
    ]
}

pub fn jv_deriv(v: &JetVec) -> JetVec {
    [v[0].deriv(), v[1].deriv(), v[2].deriv()]
}

pub fn jv_value(v: &JetVec) -> [f64; 3] {
    [v[0].value(), v[1].value(), v[2].value()]
}

pub fn jv_nth(v: &JetVec, k: usize) -> [f64; 3] {
    [v[0].nth(k), v[1].nth(k), v[2].nth(k)]
}

pub fn jv_scale(v: &JetVec, s: Jet) -> JetVec {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub fn jv_add(a: &JetVec, b: &JetVec) -> JetVec {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn jv_sub(a: &JetVec, b: &JetVec) -> JetVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Euclidean dot product.
pub fn jv_dot_e(a: &JetVec, b: &JetVec) -> Jet {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Minkowski (−,+,+) product.
pub fn jv_dot_l(a: &JetVec, b: &JetVec) -> Jet {
    a[1] * b[1] + a[2] * b[2] - a[0] * b[0]
}

pub fn jv_cross_e(a: &JetVec, b: &JetVec) -> JetVec {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Minkowski cross product, `⟨a×b, c⟩ = det[a b c]`.
pub fn jv_cross_l(a: &JetVec, b: &JetVec) -> JetVec {
    let e = jv_cross_e(a, b);
    [-e[0], e[1], e[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn elementary_functions_match_closed_form_derivatives() {
        let t = 0.37;
        let x = Jet::variable(t);
        let s = (x * 2.0).sin();
        assert!(close(s.nth(1), 2.0 * (2.0 * t).cos()));
        assert!(close(s.nth(3), -8.0 * (2.0 * t).cos()));
        let r = (x * x + 1.0).sqrt();
        // d/dt sqrt(1+t²) = t / sqrt(1+t²); second = (1+t²)^(-3/2)
        assert!(close(r.nth(1), t / (1.0 + t * t).sqrt()));
        assert!(close(r.nth(2), (1.0 + t * t).powf(-1.5)));
        let p = (x * x + 1.0).powf(-1.5);
        assert!(close(p.nth(1), -3.0 * t * (1.0 + t * t).powf(-2.5)));
        let q = x.recip();
        assert!(close(q.nth(4), 24.0 / t.powi(5)));
        assert!(close(x.cosh().nth(2), t.cosh()));
        assert!(close(x.exp().nth(4), t.exp()));
    }

    #[test]
    fn deriv_shifts() {
        let x = Jet::variable(0.5);
        let f = x.powi(4);
        let d = f.deriv();
        assert!(close(d.value(), 4.0 * 0.125));
        assert!(close(d.nth(1), 12.0 * 0.25));
        assert!(close(d.nth(3), 24.0));
    }
}
