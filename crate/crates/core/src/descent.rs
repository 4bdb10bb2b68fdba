//! Strict-decrease steps for `|t - f(z)|` and their iteration to a root.
//!
//! Recenter `f` at `v` to get `f(v + h) = Σ b_k h^k`, let `s` be the lowest
//! order with `b_s != 0` and `q = t - f(v)`. Stepping by `p = β e^{iψ}` with
//! `s ψ + arg b_s = arg q` puts `b_s p^s` on the ray of `q`; if
//!
//! * `Σ_{k>s} |b_k| β^{k-s} < |b_s|` and
//! * `|b_s| β^s < |q|`
//!
//! then `|t - f(v + p)| < |t - f(v)|`. [`descent_step`] picks such a `β`,
//! [`solve_root`] iterates it with a short line search.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Iteration budget used when callers have no better figure.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Halvings tried by the line search in [`solve_root`].
const LINE_SEARCH_HALVINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DescentStepReport {
    /// Lowest order `>= 1` with a nonzero Taylor coefficient.
    pub s: usize,
    pub beta: f64,
    pub psi: f64,
    pub before: f64,
    pub after: f64,
    /// The step `β e^{iψ}`.
    pub p: Complex64,
    /// `b_s` at the base point.
    pub b_s: Complex64,
    /// `q = t - f(v)`.
    pub q: Complex64,
    /// `Σ_{k>s} |b_k| β^{k-s}` at the accepted `β`.
    pub tail_sum: f64,
}

impl DescentStepReport {
    /// Checks both step conditions as literal inequalities.
    pub fn conditions_hold(&self) -> bool {
        self.tail_sum < self.b_s.norm() && self.b_s.norm() * self.beta.powi(self.s as i32) < self.q.norm()
    }

    /// Distance of `s ψ + arg b_s - arg q` from a multiple of 2π.
    pub fn phase_error(&self) -> f64 {
        let d = (self.s as f64 * self.psi + self.b_s.arg() - self.q.arg()).rem_euclid(TAU);
        d.min(TAU - d)
    }
}

/// Coefficients at or below this size count as zero.
fn drop_tol(b: &Poly) -> f64 {
    let max = b.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    1e-13 * (1.0 + max)
}

fn tail_sum(b: &[Complex64], s: usize, beta: f64) -> f64 {
    b.iter()
        .enumerate()
        .skip(s + 1)
        .map(|(k, c)| c.norm() * beta.powi((k - s) as i32))
        .sum()
}

/// Largest power of two (capped at 2^60) satisfying the tail condition, or
/// infinity when there is no tail.
fn tail_bound(b: &[Complex64], s: usize) -> f64 {
    let bs = b[s].norm();
    if s + 1 >= b.len() {
        return f64::INFINITY;
    }
    let mut beta = 1.0f64;
    if tail_sum(b, s, beta) < bs {
        while beta < 2f64.powi(60) && tail_sum(b, s, 2.0 * beta) < bs {
            beta *= 2.0;
        }
    } else {
        while tail_sum(b, s, beta) >= bs {
            beta *= 0.5;
            if beta == 0.0 {
                break;
            }
        }
    }
    beta
}

/// One Cater/Argand decrease step from `v` towards the value `t`.
///
/// `radius_cap`, when given, keeps `|v + p| < radius_cap`.
pub fn descent_step(
    p: &Poly,
    v: Complex64,
    t: Complex64,
    radius_cap: Option<f64>,
) -> Result<DescentStepReport> {
    if p.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let b = p.taylor_shift(v);
    let tol = drop_tol(&b);
    let q = t - b.coeffs()[0];
    if q.norm() <= tol {
        return Err(Error::AtTarget(q.norm()));
    }
    let s = (1..=b.degree())
        .find(|&k| b.coeffs()[k].norm() > tol)
        .ok_or(Error::DegenerateConstant)?;
    step_at_order(p, &b, v, q, s, radius_cap)
}

fn step_at_order(
    p: &Poly,
    b: &Poly,
    v: Complex64,
    q: Complex64,
    s: usize,
    radius_cap: Option<f64>,
) -> Result<DescentStepReport> {
    let coeffs = b.coeffs();
    let b_s = coeffs[s];
    let before = q.norm();
    let beta_tail = tail_bound(coeffs, s);
    let beta_target = (before / b_s.norm()).powf(1.0 / s as f64);
    let beta_cap = match radius_cap {
        Some(cap) if cap <= v.norm() => return Err(Error::OutsideRadiusCap),
        Some(cap) => cap - v.norm(),
        None => f64::INFINITY,
    };
    let beta = 0.9 * beta_tail.min(beta_target).min(beta_cap);
    let psi = (q.arg() - b_s.arg()) / s as f64;
    let step = Complex64::from_polar(beta, psi);
    let t = q + coeffs[0];
    let after = (t - p.eval(v + step)).norm();
    if !(after < before) {
        return Err(Error::NoNumericalDecrease { order: s });
    }
    Ok(DescentStepReport {
        s,
        beta,
        psi,
        before,
        after,
        p: step,
        b_s,
        q,
        tail_sum: tail_sum(coeffs, s, beta),
    })
}

/// Like [`descent_step`], but if rounding swamps the decrease at the lowest
/// order, retries at the next nonzero orders.
fn robust_step(p: &Poly, v: Complex64, t: Complex64) -> Result<DescentStepReport> {
    match descent_step(p, v, t, None) {
        Err(Error::NoNumericalDecrease { order }) => {
            let b = p.taylor_shift(v);
            let tol = drop_tol(&b);
            let q = t - b.coeffs()[0];
            let mut last = Error::NoNumericalDecrease { order };
            for s in order + 1..=b.degree() {
                if b.coeffs()[s].norm() <= tol {
                    continue;
                }
                match step_at_order(p, &b, v, q, s, None) {
                    Ok(r) => return Ok(r),
                    Err(e) => last = e,
                }
            }
            Err(last)
        }
        other => other,
    }
}

/// Rounding error bound of Horner evaluation of `p(v) - t`.
fn rounding_floor(p: &Poly, v: Complex64, t: Complex64) -> f64 {
    let magnitude = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * v.norm() + c.norm());
    8.0 * f64::EPSILON * (p.degree() as f64 * magnitude + t.norm())
}

/// Iterates descent steps from `v0` until `|f(z) - t| <= tol`, until the
/// residual is below the rounding error of evaluating it, or until the step
/// reports the value already at target (`|q| <= drop_tol`).
pub fn solve_root(p: &Poly, v0: Complex64, t: Complex64, tol: f64, max_iter: usize) -> Result<Complex64> {
    if p.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let mut v = v0;
    let mut residual = (p.eval(v) - t).norm();
    for _ in 0..max_iter {
        if residual <= tol.max(rounding_floor(p, v, t)) {
            return Ok(v);
        }
        let report = match robust_step(p, v, t) {
            Ok(r) => r,
            Err(Error::AtTarget(_)) => return Ok(v),
            Err(Error::NoNumericalDecrease { .. }) => break,
            Err(e) => return Err(e),
        };
        let mut best = (v + report.p, report.after);
        for k in 1..=LINE_SEARCH_HALVINGS {
            let trial = v + report.p * 0.5f64.powi(k as i32);
            let r = (p.eval(trial) - t).norm();
            if r < best.1 {
                best = (trial, r);
            }
        }
        if report.s == 1 {
            let newton = v + report.q / report.b_s;
            let r = (p.eval(newton) - t).norm();
            if r < best.1 {
                best = (newton, r);
            }
        }
        v = best.0;
        residual = best.1;
    }
    if residual <= tol.max(rounding_floor(p, v, t)) {
        return Ok(v);
    }
    Err(Error::ConvergenceFailure { iterations: max_iter, residual })
}

/// Starting point for each deflation stage; off-axis so symmetric
/// polynomials do not start on a critical point.
const START: Complex64 = Complex64::new(0.32, 0.41);

/// All `n` roots with multiplicity, by descent plus deflation, each polished
/// against `p` itself.
pub fn all_roots(p: &Poly, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let mut roots = Vec::with_capacity(n);
    let mut current = p.monic();
    let zero = Complex64::new(0.0, 0.0);
    while current.degree() > 0 {
        let z = if current.degree() == 1 {
            -current.coeffs()[0] / current.coeffs()[1]
        } else {
            solve_root(&current, START, zero, tol, DEFAULT_MAX_ITER)?
        };
        let polished = solve_root(p, z, zero, tol, DEFAULT_MAX_ITER)?;
        roots.push(polished);
        current = current.deflate(z);
    }
    Ok(roots)
}

/// Number of preimages of `w`: `(distinct clusters, total with multiplicity)`.
pub fn preimage_count(p: &Poly, w: Complex64, tol: f64, cluster_tol: f64) -> Result<(usize, usize)> {
    let roots = all_roots(&p.sub_constant(w), tol)?;
    Ok((count_clusters(&roots, cluster_tol), roots.len()))
}

/// Single-linkage clusters of points closer than `cluster_tol`.
fn count_clusters(points: &[Complex64], cluster_tol: f64) -> usize {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() <= cluster_tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..points.len()).filter(|&i| find(&mut parent, i) == i).count()
}
