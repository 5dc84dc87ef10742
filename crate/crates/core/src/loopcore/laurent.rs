use crate::mat2::{Mat2, C64};
use crate::minkalg::RealForm;

/// A loop stored as its Laurent coefficients `c_lo, ..., c_hi`. Used where
/// loops are kept long-term (frame fields), since analytic frames need far
/// fewer coefficients than circle samples.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentLoop {
    pub lo: i32,
    pub coeffs: Vec<Mat2>,
    pub form: RealForm,
}

impl LaurentLoop {
    pub fn new(lo: i32, coeffs: Vec<Mat2>, form: RealForm) -> Self {
        LaurentLoop { lo, coeffs, form }
    }

    pub fn constant(m: Mat2, form: RealForm) -> Self {
        LaurentLoop::new(0, vec![m], form)
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, j: i32) -> Mat2 {
        if j < self.lo || j > self.hi() {
            Mat2::ZERO
        } else {
            self.coeffs[(j - self.lo) as usize]
        }
    }

    /// `(L(λ), λ∂_λL(λ))` at a nonzero λ.
    pub fn eval_with_derivative(&self, lambda: C64) -> (Mat2, Mat2) {
        let mut val = Mat2::ZERO;
        let mut der = Mat2::ZERO;
        let mut p = lambda.powi(self.lo);
        for (k, cj) in self.coeffs.iter().enumerate() {
            let j = self.lo + k as i32;
            let term = *cj * p;
            val += term;
            der += term * j as f64;
            p *= lambda;
        }
        (val, der)
    }

    pub fn eval(&self, lambda: C64) -> Mat2 {
        self.eval_with_derivative(lambda).0
    }

    pub fn mul_right(&self, m: &Mat2) -> LaurentLoop {
        LaurentLoop::new(
            self.lo,
            self.coeffs.iter().map(|c| *c * *m).collect(),
            self.form,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::re;

    #[test]
    fn eval_monomial_and_derivative() {
        let e0 = Mat2::real(0.0, -1.0, 1.0, 0.0);
        let l = LaurentLoop::new(1, vec![e0], RealForm::Split);
        let (v, d) = l.eval_with_derivative(re(2.0));
        assert!((v - e0 * 2.0).norm() < 1e-15);
        assert!((d - e0 * 2.0).norm() < 1e-15);
        let l = LaurentLoop::new(-1, vec![e0, Mat2::IDENTITY, e0], RealForm::Split);
        let (v, d) = l.eval_with_derivative(re(0.5));
        assert!((v - (e0 * 2.5 + Mat2::IDENTITY)).norm() < 1e-15);
        assert!((d - e0 * (0.5 - 2.0)).norm() < 1e-15);
    }
}
