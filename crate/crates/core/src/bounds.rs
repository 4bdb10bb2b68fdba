//! Radii: properness (Reich), local openness, and the boundary minimum.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// `R = max(1, 2 Σ_{i<n} |a_i| / |a_n|)`; for `|z| >= R`,
/// `|p(z)| >= ½ |a_n| |z|^n`.
pub fn reich_radius(p: &Poly) -> Result<f64> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let lower: f64 = p.coeffs()[..n].iter().map(|c| c.norm()).sum();
    Ok((2.0 * lower / p.leading().norm()).max(1.0))
}

/// Radius `r` on which the lowest term dominates:
/// `|a_n| r^n + Σ_{j<i<n} |a_i| r^i < |a_j| r^j`, with a 1.01 margin.
///
/// Requires `p(0) = 0`. For a monomial every `r` works and 1 is returned.
pub fn openness_radius(p: &Poly) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let a = p.coeffs();
    if a[0] != Complex64::new(0.0, 0.0) {
        return Err(Error::NonzeroConstantTerm);
    }
    let n = p.degree();
    let j = a.iter().position(|c| c.norm() > 0.0).expect("nonzero polynomial");
    if j == n {
        return Ok(1.0);
    }
    let lowest = a[j].norm();
    // both sides divided by r^j
    let dominated = |r: f64| -> bool {
        let rest: f64 = (j + 1..=n).map(|i| a[i].norm() * r.powi((i - j) as i32)).sum();
        1.01 * rest < lowest
    };
    let mut r = 1.0f64;
    while !dominated(r) {
        r *= 0.5;
    }
    Ok(r)
}

/// Approximate `min_{|z|=r} |p(z)|` and `δ = d/2`.
///
/// Dense angular sampling (4096·max(1, n) points) followed by golden-section
/// refinement around the best sample. Not a certified bound.
pub fn boundary_min(p: &Poly, r: f64) -> (f64, f64) {
    let samples = 4096 * p.degree().max(1);
    boundary_min_sampled(p, r, samples)
}

pub(crate) fn boundary_min_sampled(p: &Poly, r: f64, samples: usize) -> (f64, f64) {
    let modulus = |theta: f64| p.eval(Complex64::from_polar(r, theta)).norm();
    let step = TAU / samples as f64;
    let (best_k, best) = (0..samples)
        .map(|k| (k, modulus(step * k as f64)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });

    let (mut lo, mut hi) = (step * (best_k as f64 - 1.0), step * (best_k as f64 + 1.0));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (modulus(a), modulus(b));
    for _ in 0..100 {
        if hi - lo < 1e-15 {
            break;
        }
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = modulus(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = modulus(b);
        }
    }
    let d = best.min(fa).min(fb);
    (d, d / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reich_examples() {
        for n in 1..6 {
            assert_eq!(reich_radius(&Poly::monomial(n)).unwrap(), 1.0);
        }
        assert_eq!(reich_radius(&Poly::from_real(&[1.0, 0.0, 1.0])).unwrap(), 2.0);
        assert_eq!(reich_radius(&Poly::from_real(&[3.0, 2.0, 0.0, 1.0])).unwrap(), 10.0);
        assert_eq!(reich_radius(&Poly::from_real(&[4.0])), Err(Error::DegreeZero));
    }

    #[test]
    fn reich_with_leading_coefficient() {
        // 2z^2 + 1: R = max(1, 2*1/2) = 1
        assert_eq!(reich_radius(&Poly::from_real(&[1.0, 0.0, 2.0])).unwrap(), 1.0);
    }

    #[test]
    fn openness_examples() {
        let r = openness_radius(&Poly::from_real(&[0.0, 1.0, 1.0])).unwrap();
        assert!(r <= 0.5 && r * r < r);
        assert_eq!(openness_radius(&Poly::monomial(4)).unwrap(), 1.0);
        let r = openness_radius(&Poly::from_real(&[0.0, 10.0, 0.0, 1.0])).unwrap();
        assert!(r.powi(3) < 10.0 * r);
    }

    #[test]
    fn openness_errors() {
        assert_eq!(openness_radius(&Poly::from_real(&[0.0, 0.0])), Err(Error::ZeroPolynomial));
        assert_eq!(openness_radius(&Poly::from_real(&[1.0, 1.0])), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn halving_the_samples_barely_moves_the_minimum() {
        let cases = [
            Poly::from_real(&[0.0, 1.0, 1.0]),
            Poly::from_real(&[0.0, 0.0, 2.0, -1.0, 0.5]),
            Poly::from_roots(&[Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4), Complex64::new(0.0, 0.0)]),
        ];
        for p in &cases {
            let r = openness_radius(p).unwrap();
            let (full, _) = boundary_min(p, r);
            let (half, _) = boundary_min_sampled(p, r, 2048 * p.degree());
            assert!(((full - half) / full).abs() < 1e-6, "{full} vs {half}");
        }
    }

    #[test]
    fn boundary_min_examples() {
        for n in 1..5 {
            let (d, _) = boundary_min(&Poly::monomial(n), 0.7);
            assert!((d - 0.7f64.powi(n as i32)).abs() < 1e-14);
        }
        let (d, delta) = boundary_min(&Poly::from_real(&[0.0, 1.0, 1.0]), 0.1);
        assert!((d - 0.09).abs() < 1e-12);
        assert!((delta - 0.045).abs() < 1e-12);
        let (d, delta) = boundary_min(&Poly::monomial(1), 1.0);
        assert!((d - 1.0).abs() < 1e-15 && (delta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_min_positive_inside_openness_radius() {
        let p = Poly::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, -1.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 3.0),
        ]);
        let r = openness_radius(&p).unwrap();
        assert!(boundary_min(&p, r).0 > 0.0);
    }
}
