//! Truncated power series in the weighted ℓ¹ algebra `H_r` and the
//! contraction solver for `f(x, w(x)) = 0`.
//!
//! With `f = Σ a_ij x^i y^j`, `a_00 = 0` and `a_01 != 0`, the equation is
//! rewritten as `y = g(x, y) = Σ b_ij x^i y^j`, `b_ij = -a_ij / a_01`,
//! `b_00 = b_01 = 0`. The operator `G w = g(x, w(x))` is a contraction of the
//! ball `‖w‖ <= s` in `H_r` once `B = Σ |b_i0| r^i <= s/2` and
//! `L = Σ |b_ij| r^i j s^{j-1} <= 1/2`.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 16;

/// `Σ_{k<=K} α_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![0.0; order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = 1.0;
        s
    }

    /// `x^k` at truncation order `order >= k`.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order.max(k));
        s.coeffs[k] = 1.0;
        s
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Re-truncates (or zero-pads) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        Self::new((0..=order).map(|k| self.coeff(k)).collect())
    }

    /// `‖u‖ = Σ |α_k| r^k`.
    pub fn norm(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.abs())
    }

    /// Cauchy product truncated at the larger of the two orders.
    pub fn multiply(&self, other: &Self) -> Self {
        let order = self.order().max(other.order());
        let mut out = vec![0.0; order + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `(Iu)(x) = Σ α_k x^{k+1} / (k+1)`; exact, so the order grows by one.
    pub fn integrate(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, &a) in self.coeffs.iter().enumerate() {
            out[k + 1] = a / (k + 1) as f64;
        }
        Self::new(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let order = self.order().max(other.order());
        Self::new((0..=order).map(|k| op(self.coeff(k), other.coeff(k))).collect())
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(-1.0)
    }
}

/// Finite-support `f(x, y) = Σ a_ij x^i y^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariateSeries {
    coeffs: BTreeMap<(usize, usize), f64>,
}

impl BivariateSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: &[((usize, usize), f64)]) -> Self {
        let mut s = Self::new();
        for &((i, j), a) in terms {
            s.add_term(i, j, a);
        }
        s
    }

    pub fn add_term(&mut self, i: usize, j: usize, a: f64) {
        let e = self.coeffs.entry((i, j)).or_insert(0.0);
        *e += a;
        if *e == 0.0 {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    /// Highest `x` and `y` exponents in the support.
    pub fn orders(&self) -> (usize, usize) {
        self.coeffs
            .keys()
            .fold((0, 0), |(mi, mj), &(i, j)| (mi.max(i), mj.max(j)))
    }

    /// Swaps the roles of `x` and `y`, for solving `f(x(y), y) = 0`.
    pub fn transpose(&self) -> Self {
        BivariateSeries { coeffs: self.coeffs.iter().map(|(&(i, j), &a)| ((j, i), a)).collect() }
    }

    fn check_solvable(&self) -> Result<()> {
        if self.coeff(0, 0) != 0.0 || self.coeff(0, 1) == 0.0 {
            return Err(Error::NotSolvable);
        }
        Ok(())
    }

    /// The fixed-point form `b_ij = -a_ij / a_01`, with `b_01 = 0`.
    pub fn fixed_point_form(&self) -> Result<Self> {
        self.check_solvable()?;
        let a01 = self.coeff(0, 1);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&k, _)| k != (0, 1))
            .map(|(&k, &a)| (k, -a / a01))
            .collect();
        Ok(BivariateSeries { coeffs })
    }

    /// Coefficients of `f(x, w(x))` through `order`.
    pub fn compose(&self, w: &TruncatedSeries, order: usize) -> TruncatedSeries {
        let w = w.with_order(order);
        let max_j = self.orders().1;
        let mut powers = Vec::with_capacity(max_j + 1);
        powers.push(TruncatedSeries::one(order));
        for j in 1..=max_j {
            let next = powers[j - 1].multiply(&w);
            powers.push(next);
        }
        let mut out = vec![0.0; order + 1];
        for ((i, j), a) in self.terms() {
            if i > order {
                continue;
            }
            for (k, &c) in powers[j].coeffs().iter().enumerate().take(order + 1 - i) {
                out[i + k] += a * c;
            }
        }
        TruncatedSeries::new(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiiRecipe {
    pub r: f64,
    pub s: f64,
    /// `Σ_i |b_i0| r^i = ‖G(0)‖`.
    pub b: f64,
    /// Lipschitz bound of `G` on the ball of radius `s`.
    pub l: f64,
}

impl RadiiRecipe {
    pub fn is_valid(&self) -> bool {
        self.b <= self.s / 2.0 && self.l <= 0.5
    }
}

fn recipe_sums(g: &BivariateSeries, r: f64, s: f64) -> (f64, f64) {
    let b = g.terms().filter(|((_, j), _)| *j == 0).map(|((i, _), a)| a.abs() * r.powi(i as i32)).sum();
    let l = g
        .terms()
        .filter(|((_, j), _)| *j >= 1)
        .map(|((i, j), a)| a.abs() * r.powi(i as i32) * j as f64 * s.powi(j as i32 - 1))
        .sum();
    (b, l)
}

/// Halves `r` from `r_init`, with `s = 4B`, until `B <= s/2` and `L <= 1/2`.
pub fn choose_radii(f: &BivariateSeries, r_init: f64) -> Result<RadiiRecipe> {
    let g = f.fixed_point_form()?;
    let mut r = r_init;
    while r >= 1e-300 {
        let (b, _) = recipe_sums(&g, r, 0.0);
        let s = if b > 0.0 { 4.0 * b } else { r };
        let (b, l) = recipe_sums(&g, r, s);
        let recipe = RadiiRecipe { r, s, b, l };
        if recipe.is_valid() {
            return Ok(recipe);
        }
        r *= 0.5;
    }
    Err(Error::NoConvergentRadii)
}

/// `G w = g(x, w(x))` truncated at `order`.
#[derive(Debug, Clone)]
pub struct ImplicitOperator {
    g: BivariateSeries,
    order: usize,
}

impl ImplicitOperator {
    pub fn new(f: &BivariateSeries, order: usize) -> Result<Self> {
        Ok(ImplicitOperator { g: f.fixed_point_form()?, order })
    }

    pub fn apply(&self, w: &TruncatedSeries) -> TruncatedSeries {
        self.g.compose(w, self.order)
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

/// Fixed point of `G` from `w_0 = 0`, iterated at least `K + 1` times and
/// until successive iterates are within `tol` in the `H_r` norm.
pub fn implicit_series_solve(f: &BivariateSeries, order: usize, tol: f64) -> Result<TruncatedSeries> {
    let recipe = choose_radii(f, 1.0)?;
    let op = ImplicitOperator::new(f, order)?;
    let r = recipe.r;
    let mut w = TruncatedSeries::zero(order);
    let mut prev_dist: Option<f64> = None;
    for m in 0.. {
        let next = op.apply(&w);
        let dist = (&next - &w).norm(r);
        let floor = 64.0 * f64::EPSILON * (1.0 + next.norm(r));
        if let Some(pd) = prev_dist {
            if pd > floor && dist > floor {
                let ratio = dist / pd;
                if ratio > 0.5 + 1e-9 {
                    return Err(Error::ContractionStall { ratio });
                }
            }
        }
        w = next;
        if m >= order && dist <= tol {
            break;
        }
        if m > 64 * (order + 1) + 1000 {
            return Err(Error::ContractionStall { ratio: f64::NAN });
        }
        prev_dist = Some(dist);
    }
    Ok(w)
}

/// The two analytic branches `Y = ±x √(1 + x)` of the nodal cubic
/// `F = y² - x²(x + 1)` at its node, as `(plus, minus)`.
///
/// `F` is singular at the origin, so the solver runs on the blow-up:
/// `y = x (1 + v)` turns `F = 0` into `2v + v² - x = 0`.
pub fn nodal_cubic_demo() -> (TruncatedSeries, TruncatedSeries) {
    let order = DEFAULT_ORDER;
    let blown_up = BivariateSeries::from_terms(&[((0, 1), 2.0), ((0, 2), 1.0), ((1, 0), -1.0)]);
    let v = implicit_series_solve(&blown_up, order, 1e-15).expect("blow-up satisfies the recipe");
    let one_plus_v = &TruncatedSeries::one(order) + &v;
    let plus = TruncatedSeries::monomial(1, order).multiply(&one_plus_v);
    let minus = -&plus;
    (plus, minus)
}

/// `F(x, y) = y² - x²(x + 1)`.
pub fn nodal_cubic() -> BivariateSeries {
    BivariateSeries::from_terms(&[((0, 2), 1.0), ((2, 0), -1.0), ((3, 0), -1.0)])
}
