//! Dense complex polynomials and their harmonic components.
//!
//! A [`Poly`] stores coefficients in ascending powers. Writing
//! `f(x + iy) = g(x, y) + i h(x, y)`, [`Poly::harmonic_eval`] returns `g`, `h`
//! and their first partials, all taken from `f` and `f'` so that the
//! Cauchy–Riemann relations hold exactly.

use std::fmt;

use num_complex::Complex64;

use crate::descent;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial from ascending-power coefficients, trimming
    /// trailing zeros. An empty input is the zero polynomial.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Self {
        let lead = self.leading();
        if lead == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| c / lead).collect())
    }

    /// `p(z) - c`.
    pub fn sub_constant(&self, c: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] -= c;
        Self::new(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut value = zero;
        let mut deriv = zero;
        for &c in self.coeffs.iter().rev() {
            deriv = deriv * z + value;
            value = value * z + c;
        }
        (value, deriv)
    }

    /// `Σ |a_k| |z|^k`, the magnitude floor for rounding in [`Poly::eval`].
    pub fn eval_magnitude(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::constant(Complex64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Coefficients `b_k` of `p(v + h) = Σ b_k h^k`, by repeated synthetic
    /// division by `(z - v)`.
    pub fn taylor_shift(&self, v: Complex64) -> Self {
        let mut b = self.coeffs.clone();
        let n = self.degree();
        for i in 0..n {
            for j in (i..n).rev() {
                let upper = b[j + 1];
                b[j] += v * upper;
            }
        }
        Poly { coeffs: b }
    }

    /// Synthetic division by `(z - root)`, dropping the remainder.
    pub fn deflate(&self, root: Complex64) -> Self {
        let n = self.degree();
        if n == 0 {
            return self.clone();
        }
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        let mut carry = self.coeffs[n];
        q[n - 1] = carry;
        for k in (1..n).rev() {
            carry = self.coeffs[k] + carry * root;
            q[k - 1] = carry;
        }
        Self::new(q)
    }

    pub fn harmonic_eval(&self, x: f64, y: f64) -> HarmonicEval {
        let (f, df) = self.eval_with_derivative(Complex64::new(x, y));
        HarmonicEval { g: f.re, h: f.im, gx: df.re, gy: -df.im, hx: df.im, hy: df.re }
    }

    /// Roots of `p'` with multiplicity, each with `|p'(z)| <= tol`.
    pub fn critical_points(&self, tol: f64) -> Result<Vec<Complex64>> {
        if self.degree() == 0 {
            return Err(Error::DegreeZero);
        }
        let d = self.derivative();
        match d.degree() {
            0 => Ok(Vec::new()),
            1 => Ok(vec![-d.coeffs[0] / d.coeffs[1]]),
            _ => descent::all_roots(&d, tol),
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

/// `g = Re f`, `h = Im f` and their partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicEval {
    pub g: f64,
    pub h: f64,
    pub gx: f64,
    pub gy: f64,
    pub hx: f64,
    pub hy: f64,
}

/// Which harmonic component a level curve belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    G,
    H,
}

impl HarmonicEval {
    pub fn value(&self, field: Field) -> f64 {
        match field {
            Field::G => self.g,
            Field::H => self.h,
        }
    }

    pub fn gradient(&self, field: Field) -> (f64, f64) {
        match field {
            Field::G => (self.gx, self.gy),
            Field::H => (self.hx, self.hy),
        }
    }
}
